//! Binary post-processing of phase features.
//!
//! Out-of-bounds neighbours are background for every operation here.

use ndarray::{Array2, ArrayView2, Zip};

use crate::error::{check_shape, invalid, Result};
use crate::kernels::KernelParams;
use crate::stretch::ImagePlane;

/// Pixels below `max / DARK_FRACTION` never carry features.
pub const DARK_FRACTION: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMap(pub Array2<bool>);

impl BinaryMap {
    pub fn zeros(height: usize, width: usize) -> Self {
        Self(Array2::from_elem((height, width), false))
    }

    pub fn from_bits(bits: &[&[u8]]) -> Self {
        let h = bits.len();
        let w = bits.first().map_or(0, |r| r.len());
        Self(Array2::from_shape_fn((h, w), |(i, j)| bits[i][j] != 0))
    }

    pub fn dim(&self) -> (usize, usize) {
        self.0.dim()
    }

    pub fn get(&self, i: isize, j: isize) -> bool {
        let (h, w) = self.dim();
        if i < 0 || j < 0 || i as usize >= h || j as usize >= w {
            false
        } else {
            self.0[[i as usize, j as usize]]
        }
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn to_f64(&self) -> Array2<f64> {
        self.0.mapv(|b| if b { 1.0 } else { 0.0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl TryFrom<u8> for Connectivity {
    type Error = crate::PageError;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            4 => Ok(Self::Four),
            8 => Ok(Self::Eight),
            _ => Err(invalid("connectivity", format!("must be 4 or 8, got {n}"))),
        }
    }
}

/// Marks phases outside `[thresh_min, thresh_max]`, then clears dark pixels.
pub fn bipolar_threshold(
    phase: ArrayView2<'_, f64>,
    img: &ImagePlane,
    thresh_min: f64,
    thresh_max: f64,
) -> Result<BinaryMap> {
    if !(thresh_min < thresh_max) {
        return Err(invalid(
            "thresh_min",
            format!("must be below thresh_max ({thresh_min} >= {thresh_max})"),
        ));
    }
    check_shape(img.dim(), phase.dim())?;
    let floor = img.max() / DARK_FRACTION;
    let bits = Zip::from(&phase)
        .and(img.pixels())
        .map_collect(|&p, &x| (p > thresh_max || p < thresh_min) && !(x < floor));
    Ok(BinaryMap(bits))
}

/// 3x3 hit-or-miss element: `Some(true)` foreground, `Some(false)` background, `None` don't care.
type Element = [[Option<bool>; 3]; 3];

const F: Option<bool> = Some(true);
const B: Option<bool> = Some(false);
const X: Option<bool> = None;

const EDGE: Element = [[B, B, B], [X, F, X], [F, F, F]];
const CORNER: Element = [[X, B, B], [F, F, B], [X, F, X]];

fn rotate_cw(e: &Element) -> Element {
    let mut out = [[None; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = e[2 - j][i];
        }
    }
    out
}

/// The eight Golay L elements in sweep order: edge and corner, rotated clockwise.
fn thinning_elements() -> [Element; 8] {
    let mut out = [EDGE; 8];
    let (mut edge, mut corner) = (EDGE, CORNER);
    for k in 0..4 {
        out[2 * k] = edge;
        out[2 * k + 1] = corner;
        edge = rotate_cw(&edge);
        corner = rotate_cw(&corner);
    }
    out
}

/// Bit `3 * di + dj` set when neighbour `(i + di - 1, j + dj - 1)` is foreground.
fn neighbourhood_codes(b: &BinaryMap) -> Array2<u16> {
    let (h, w) = b.dim();
    let (ph, pw) = (h + 2, w + 2);
    let mut padded = vec![false; ph * pw];
    for ((i, j), &v) in b.0.indexed_iter() {
        padded[(i + 1) * pw + j + 1] = v;
    }
    Array2::from_shape_fn((h, w), |(i, j)| {
        let mut code = 0u16;
        for di in 0..3 {
            let base = (i + di) * pw + j;
            for dj in 0..3 {
                if padded[base + dj] {
                    code |= 1 << (3 * di + dj);
                }
            }
        }
        code
    })
}

/// `(care mask, required bits)` form of an element.
fn element_mask(elem: &Element) -> (u16, u16) {
    let (mut care, mut want) = (0u16, 0u16);
    for (di, row) in elem.iter().enumerate() {
        for (dj, cell) in row.iter().enumerate() {
            if let Some(fg) = cell {
                care |= 1 << (3 * di + dj);
                if *fg {
                    want |= 1 << (3 * di + dj);
                }
            }
        }
    }
    (care, want)
}

fn hit_or_miss(b: &BinaryMap, elem: &Element) -> Array2<bool> {
    let (care, want) = element_mask(elem);
    neighbourhood_codes(b).mapv(|code| code & care == want)
}

/// Hit-or-miss thinning; each iteration sweeps all eight elements in turn.
/// Stops early once a sweep removes nothing.
pub fn thin(b: &BinaryMap, iterations: usize) -> BinaryMap {
    let elements = thinning_elements();
    let mut cur = b.clone();
    for _ in 0..iterations {
        let before = cur.count();
        for elem in &elements {
            let hits = hit_or_miss(&cur, elem);
            Zip::from(&mut cur.0).and(&hits).for_each(|p, &hit| *p &= !hit);
        }
        if cur.count() == before {
            break;
        }
    }
    cur
}

/// Foreground pixels with at least one background neighbour.
pub fn perimeter(b: &BinaryMap, connectivity: Connectivity) -> BinaryMap {
    const FOUR: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
    const EIGHT: [(isize, isize); 8] = [
        (-1, -1),
        (-1, 0),
        (-1, 1),
        (0, -1),
        (0, 1),
        (1, -1),
        (1, 0),
        (1, 1),
    ];
    let offsets: &[(isize, isize)] = match connectivity {
        Connectivity::Four => &FOUR,
        Connectivity::Eight => &EIGHT,
    };
    let (h, w) = b.dim();
    BinaryMap(Array2::from_shape_fn((h, w), |(i, j)| {
        b.0[[i, j]]
            && offsets
                .iter()
                .any(|&(di, dj)| !b.get(i as isize + di, j as isize + dj))
    }))
}

/// Binary erosion with origin at `(rows / 2, cols / 2)` of the element.
pub fn erode(b: &BinaryMap, selem: ArrayView2<'_, bool>) -> Result<BinaryMap> {
    let active: Vec<(isize, isize)> = selem
        .indexed_iter()
        .filter(|(_, &on)| on)
        .map(|((i, j), _)| (i as isize, j as isize))
        .collect();
    if active.is_empty() {
        return Err(invalid("selem", "structuring element has no active cells"));
    }
    let (oi, oj) = ((selem.nrows() / 2) as isize, (selem.ncols() / 2) as isize);
    let (h, w) = b.dim();
    Ok(BinaryMap(Array2::from_shape_fn((h, w), |(i, j)| {
        active
            .iter()
            .all(|&(di, dj)| b.get(i as isize + di - oi, j as isize + dj - oj))
    })))
}

/// Threshold, thin, 4-perimeter, thin, and the trailing 1x1 erosion (identity).
pub fn binarize_features(
    phase: ArrayView2<'_, f64>,
    img: &ImagePlane,
    params: &KernelParams,
) -> Result<BinaryMap> {
    let out = bipolar_threshold(phase, img, params.thresh_min, params.thresh_max)?;
    let out = thin(&out, 1);
    let out = perimeter(&out, Connectivity::Four);
    let out = thin(&out, 1);
    erode(&out, Array2::from_elem((1, 1), true).view())
}

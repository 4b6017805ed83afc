//! Severity-controlled degradations: white strokes (CS1), white segments
//! and blotches over words (CS2), white rectangles plus black clutter (CS3).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::font;
use crate::geometry::{Canvas, Color, Image, Point};
use crate::rng::SeededRng;

/// Degradation severity in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Severity(f64);

impl Severity {
    pub fn new(s: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&s) {
            Ok(Self(s))
        } else {
            Err(Error::param(format!("severity {s} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn preset(d: crate::Difficulty) -> Self {
        Self(d.pick(0.2, 0.45, 0.7))
    }
}

/// `base + slope * s`, rounded; severity zero always yields zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearLaw {
    pub base: f64,
    pub slope: f64,
}

impl LinearLaw {
    pub const fn new(base: f64, slope: f64) -> Self {
        Self { base, slope }
    }

    pub fn at(self, s: Severity) -> u32 {
        if s.0 == 0.0 {
            0
        } else {
            (self.base + (self.slope * s.0).round()).max(0.0) as u32
        }
    }
}

/// Constants of all occlusion laws; defaults follow the documented presets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcclusionLaws {
    pub cs1_strokes: LinearLaw,
    pub cs1_width_px: LinearLaw,
    pub cs1_length_frac: (f64, f64),
    pub cs2_segments: LinearLaw,
    pub cs2_thickness_px: LinearLaw,
    pub cs2_blotches: LinearLaw,
    pub cs2_radius_px: LinearLaw,
    pub cs3_rects: LinearLaw,
    pub cs3_lines: LinearLaw,
    pub cs3_rect_frac: f64,
    pub cs3_line_frac: (f64, f64),
    pub cs3_line_width_px: f64,
}

impl Default for OcclusionLaws {
    fn default() -> Self {
        Self {
            cs1_strokes: LinearLaw::new(2.0, 18.0),
            cs1_width_px: LinearLaw::new(2.0, 6.0),
            cs1_length_frac: (0.3, 0.8),
            cs2_segments: LinearLaw::new(3.0, 12.0),
            cs2_thickness_px: LinearLaw::new(2.0, 4.0),
            cs2_blotches: LinearLaw::new(2.0, 6.0),
            cs2_radius_px: LinearLaw::new(2.0, 8.0),
            cs3_rects: LinearLaw::new(0.0, 12.0),
            cs3_lines: LinearLaw::new(0.0, 40.0),
            cs3_rect_frac: 0.25,
            cs3_line_frac: (0.03, 0.08),
            cs3_line_width_px: 3.0,
        }
    }
}

fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.unit()
}

/// Bounding box of dark pixels, or the whole image when blank.
fn ink_box(img: &Image) -> (Point, Point) {
    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
    for (x, y, p) in img.enumerate_pixels() {
        if p.0[0] < 128 {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
    }
    if x0 == u32::MAX {
        return (Point::new(0.0, 0.0), Point::new(img.width() as f64, img.height() as f64));
    }
    (Point::new(x0 as f64, y0 as f64), Point::new(x1 as f64 + 1.0, y1 as f64 + 1.0))
}

fn random_segment(rng: &mut SeededRng, min: Point, max: Point, length: f64) -> (Point, Point) {
    let c = Point::new(uniform(rng, min.x, max.x), uniform(rng, min.y, max.y));
    let t = uniform(rng, 0.0, PI);
    let d = Point::new(t.cos(), t.sin()).scale(length / 2.0);
    (c.sub(d), c.add(d))
}

/// CS1: randomly oriented white strokes across the figure.
pub fn occlude_silhouette(image: &Image, s: Severity, laws: &OcclusionLaws, rng: &mut SeededRng) -> Image {
    let n = laws.cs1_strokes.at(s);
    if n == 0 {
        return image.clone();
    }
    let width = laws.cs1_width_px.at(s) as f64;
    let (min, max) = ink_box(image);
    let size = image.width().min(image.height()) as f64;
    let mut canvas = Canvas::from_image(image.clone());
    for _ in 0..n {
        let len = size * uniform(rng, laws.cs1_length_frac.0, laws.cs1_length_frac.1);
        let (a, b) = random_segment(rng, min, max, len);
        canvas.line(a, b, width, Color::WHITE);
    }
    canvas.into_image()
}

/// Cap height of rendered words in pixels.
pub const WORD_SIZE: f64 = 42.0;
pub const WORD_STROKE: f64 = 4.0;
const WORD_MARGIN: f64 = 16.0;

/// Clean rendering of a lowercase word.
pub fn render_word(word: &str) -> Result<Image> {
    if word.is_empty() || !word.chars().all(|c| c.is_ascii_lowercase()) {
        return Err(Error::param(format!("`{word}` is not a lowercase alphabetic word")));
    }
    let scale = WORD_SIZE / font::CAP_HEIGHT;
    let width = (font::text_width(word) * scale + 2.0 * WORD_MARGIN).ceil();
    let height = (8.0 * scale + 2.0 * WORD_MARGIN).ceil();
    let center = Point::new(width / 2.0, WORD_MARGIN + 3.0 * scale);
    let mut canvas = Canvas::new(width as u32, height as u32, Color::WHITE);
    for stroke in font::layout(word, center, WORD_SIZE, 0) {
        canvas.polyline(&stroke, false, WORD_STROKE, Color::BLACK);
    }
    Ok(canvas.into_image())
}

/// CS2: white segments and discs over a rendered word.
pub fn conceal_word(word: &str, s: Severity, laws: &OcclusionLaws, rng: &mut SeededRng) -> Result<Image> {
    let clean = render_word(word)?;
    let segments = laws.cs2_segments.at(s);
    let blotches = laws.cs2_blotches.at(s);
    if segments == 0 && blotches == 0 {
        return Ok(clean);
    }
    let thickness = laws.cs2_thickness_px.at(s) as f64;
    let radius = laws.cs2_radius_px.at(s) as f64;
    let (min, max) = ink_box(&clean);
    let span = max.y - min.y;
    let mut canvas = Canvas::from_image(clean);
    for _ in 0..segments {
        let len = span * uniform(rng, 0.5, 1.0);
        let (a, b) = random_segment(rng, min, max, len);
        canvas.line(a, b, thickness, Color::WHITE);
    }
    for _ in 0..blotches {
        let c = Point::new(uniform(rng, min.x, max.x), uniform(rng, min.y, max.y));
        canvas.disc(c, radius, Color::WHITE);
    }
    Ok(canvas.into_image())
}

/// CS3: white rectangles, then short black clutter segments.
pub fn snowy_picture(image: &Image, s: Severity, laws: &OcclusionLaws, rng: &mut SeededRng) -> Image {
    let n_r = laws.cs3_rects.at(s);
    let n_l = laws.cs3_lines.at(s);
    if n_r == 0 && n_l == 0 {
        return image.clone();
    }
    let (w, h) = (image.width() as f64, image.height() as f64);
    let short = w.min(h);
    let mut canvas = Canvas::from_image(image.clone());
    for _ in 0..n_r {
        let rw = uniform(rng, 0.0, laws.cs3_rect_frac * short);
        let rh = uniform(rng, 0.0, laws.cs3_rect_frac * short);
        let x = uniform(rng, 0.0, w - rw);
        let y = uniform(rng, 0.0, h - rh);
        canvas.rect(Point::new(x, y), Point::new(x + rw, y + rh), Color::WHITE);
    }
    for _ in 0..n_l {
        let len = short * uniform(rng, laws.cs3_line_frac.0, laws.cs3_line_frac.1);
        let (a, b) = random_segment(rng, Point::new(0.0, 0.0), Point::new(w, h), len);
        canvas.line(a, b, laws.cs3_line_width_px, Color::BLACK);
    }
    canvas.into_image()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::occlusion::assets::catalog;
    use crate::occlusion::ASSET_PX;

    fn sev(s: f64) -> Severity {
        Severity::new(s).unwrap()
    }

    fn erased(orig: &Image, out: &Image) -> usize {
        orig.pixels().zip(out.pixels()).filter(|(a, b)| a.0[0] == 0 && b.0[0] == 255).count()
    }

    fn cluttered(orig: &Image, out: &Image) -> usize {
        orig.pixels().zip(out.pixels()).filter(|(a, b)| a.0[0] == 255 && b.0[0] == 0).count()
    }

    #[test]
    fn severity_bounds() {
        assert!(Severity::new(-0.1).is_err());
        assert!(Severity::new(1.1).is_err());
        assert!(Severity::new(f64::NAN).is_err());
    }

    #[test]
    fn linear_law_constants() {
        let l = OcclusionLaws::default();
        assert_eq!(l.cs1_strokes.at(sev(1.0)), 20);
        assert_eq!(l.cs1_width_px.at(sev(0.5)), 5);
        assert_eq!(l.cs3_rects.at(sev(1.0)), 12);
        assert_eq!(l.cs3_lines.at(sev(1.0)), 40);
        assert_eq!(l.cs2_segments.at(sev(0.45)), 8);
        assert_eq!(l.cs2_radius_px.at(sev(1.0)), 10);
        assert_eq!(l.cs1_strokes.at(sev(0.0)), 0);
    }

    #[test]
    fn zero_severity_is_identity() {
        let laws = OcclusionLaws::default();
        let img = catalog()[0].image(ASSET_PX);
        let mut rng = SeededRng::new(1);
        assert_eq!(occlude_silhouette(&img, sev(0.0), &laws, &mut rng), img);
        assert_eq!(snowy_picture(&img, sev(0.0), &laws, &mut rng), img);
        assert_eq!(conceal_word("women", sev(0.0), &laws, &mut rng).unwrap(), render_word("women").unwrap());
    }

    #[test]
    fn stronger_cs1_erases_more() {
        let laws = OcclusionLaws::default();
        let cat = catalog();
        let (mut hi, mut lo) = (0, 0);
        for seed in 0..50u64 {
            let img = cat[seed as usize % cat.len()].image(ASSET_PX);
            hi += erased(&img, &occlude_silhouette(&img, sev(1.0), &laws, &mut SeededRng::new(seed)));
            lo += erased(&img, &occlude_silhouette(&img, sev(0.2), &laws, &mut SeededRng::new(seed)));
        }
        assert!(hi > lo, "{hi} <= {lo}");
    }

    #[test]
    fn degradation_is_deterministic() {
        let laws = OcclusionLaws::default();
        let img = catalog()[3].image(ASSET_PX);
        let a = occlude_silhouette(&img, sev(0.45), &laws, &mut SeededRng::new(9));
        let b = occlude_silhouette(&img, sev(0.45), &laws, &mut SeededRng::new(9));
        assert_eq!(a, b);
        assert_eq!(a.dimensions(), img.dimensions());
        let c = snowy_picture(&img, sev(0.45), &laws, &mut SeededRng::new(9));
        assert_eq!(c, snowy_picture(&img, sev(0.45), &laws, &mut SeededRng::new(9)));
    }

    #[test]
    fn concealed_fraction_is_monotone() {
        let laws = OcclusionLaws::default();
        let clean = render_word("women").unwrap();
        let ink = clean.pixels().filter(|p| p.0[0] == 0).count() as f64;
        let mut prev = 0.0;
        for step in 1..=9 {
            let s = sev(step as f64 / 10.0);
            let total: f64 = (0..100u64)
                .map(|seed| {
                    let out = conceal_word("women", s, &laws, &mut SeededRng::new(seed)).unwrap();
                    erased(&clean, &out) as f64 / ink
                })
                .sum();
            let mean = total / 100.0;
            assert!(mean >= prev, "s = {}: {mean} < {prev}", s.value());
            prev = mean;
        }
    }

    #[test]
    fn clutter_grows_with_severity() {
        let laws = OcclusionLaws::default();
        let img = catalog()[5].image(ASSET_PX);
        let mut prev = 0.0;
        for step in 1..=9 {
            let s = sev(step as f64 / 10.0);
            let total: usize = (0..100u64)
                .map(|seed| cluttered(&img, &snowy_picture(&img, s, &laws, &mut SeededRng::new(seed))))
                .sum();
            let mean = total as f64 / 100.0;
            assert!(mean > prev, "s = {}", s.value());
            prev = mean;
        }
    }

    #[test]
    fn rejects_non_alphabetic_words() {
        let laws = OcclusionLaws::default();
        assert!(conceal_word("wo men", sev(0.3), &laws, &mut SeededRng::new(0)).is_err());
        assert!(conceal_word("Women", sev(0.3), &laws, &mut SeededRng::new(0)).is_err());
    }
}

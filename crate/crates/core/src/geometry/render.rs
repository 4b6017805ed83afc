//! Declarative scenes and a deterministic, non-antialiased rasterizer.
//!
//! Scenes are drawn in their own view-box units and scaled to the requested
//! pixel size. Coverage is decided at pixel centres with plain `f64`
//! arithmetic, so a scene renders to the same bytes on every run.

use base64::Engine;
use image::{GrayImage, Luma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::font;
use crate::geometry::plane::Point;

pub type Image = GrayImage;

/// Default canvas edge in pixels.
pub const DEFAULT_CANVAS: u32 = 600;
/// Default stroke width at the default canvas size.
pub const DEFAULT_STROKE: f64 = 3.0;

pub const SCENE_FORMAT_VERSION: u32 = 1;

/// 8-bit gray level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Color(pub u8);

impl Color {
    pub const BLACK: Color = Color(0);
    pub const WHITE: Color = Color(255);
    pub const GRAY: Color = Color(160);
    pub const LIGHT: Color = Color(225);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stroke {
    pub width: f64,
    pub color: Color,
}

impl Stroke {
    pub fn black(width: f64) -> Self {
        Self { width, color: Color::BLACK }
    }
}

/// Raw gray raster embedded in a scene.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tile {
    pub width: u32,
    pub height: u32,
    #[serde(with = "base64_bytes")]
    pub pixels: Vec<u8>,
}

impl Tile {
    pub fn from_image(img: &Image) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            pixels: img.as_raw().clone(),
        }
    }

    pub fn to_image(&self) -> Image {
        GrayImage::from_raw(self.width, self.height, self.pixels.clone()).expect("tile buffer size")
    }
}

mod base64_bytes {
    use base64::Engine;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&base64::engine::general_purpose::STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        base64::engine::general_purpose::STANDARD
            .decode(s.as_bytes())
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    Line {
        from: Point,
        to: Point,
        stroke: Stroke,
    },
    Polyline {
        points: Vec<Point>,
        closed: bool,
        stroke: Stroke,
    },
    Circle {
        center: Point,
        radius: f64,
        fill: Option<Color>,
        stroke: Option<Stroke>,
    },
    Polygon {
        points: Vec<Point>,
        fill: Option<Color>,
        stroke: Option<Stroke>,
    },
    Raster {
        origin: Point,
        width: f64,
        height: f64,
        tile: Tile,
    },
    Text {
        text: String,
        center: Point,
        size: f64,
        quarter_turns: u8,
        stroke: Stroke,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layered {
    pub layer: i32,
    #[serde(flatten)]
    pub primitive: Primitive,
}

/// An ordered drawing in view-box units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub width: f64,
    pub height: f64,
    pub background: Color,
    pub items: Vec<Layered>,
}

#[derive(Serialize, Deserialize)]
struct SceneDocument {
    version: u32,
    scene: Scene,
}

impl Scene {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            background: Color::WHITE,
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, layer: i32, primitive: Primitive) -> &mut Self {
        self.items.push(Layered { layer, primitive });
        self
    }

    pub fn line(&mut self, from: Point, to: Point, width: f64) -> &mut Self {
        self.push(0, Primitive::Line { from, to, stroke: Stroke::black(width) })
    }

    pub fn disc(&mut self, center: Point, radius: f64, color: Color) -> &mut Self {
        self.push(0, Primitive::Circle { center, radius, fill: Some(color), stroke: None })
    }

    pub fn ring(&mut self, center: Point, radius: f64, width: f64) -> &mut Self {
        self.push(0, Primitive::Circle { center, radius, fill: None, stroke: Some(Stroke::black(width)) })
    }

    pub fn text(&mut self, text: &str, center: Point, size: f64, width: f64) -> &mut Self {
        self.push(
            1,
            Primitive::Text {
                text: text.to_string(),
                center,
                size,
                quarter_turns: 0,
                stroke: Stroke::black(width),
            },
        )
    }

    /// Versioned structured-text form.
    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(&SceneDocument {
            version: SCENE_FORMAT_VERSION,
            scene: self.clone(),
        })
        .expect("scene serializes")
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let doc: SceneDocument = serde_json::from_str(text).map_err(|e| Error::Render(e.to_string()))?;
        if doc.version != SCENE_FORMAT_VERSION {
            return Err(Error::Render(format!("unsupported scene version {}", doc.version)));
        }
        Ok(doc.scene)
    }

    /// Scalable vector sidecar.
    pub fn to_svg(&self) -> String {
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\">\n",
            self.width, self.height, self.width, self.height
        );
        out.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
            self.width,
            self.height,
            svg_color(self.background)
        ));
        for item in sorted(&self.items) {
            out.push_str(&svg_element(&item.primitive));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn sorted(items: &[Layered]) -> Vec<&Layered> {
    let mut v: Vec<&Layered> = items.iter().collect();
    v.sort_by_key(|i| i.layer);
    v
}

fn svg_color(c: Color) -> String {
    format!("#{:02x}{:02x}{:02x}", c.0, c.0, c.0)
}

fn svg_points(points: &[Point]) -> String {
    points.iter().map(|p| format!("{},{}", p.x, p.y)).collect::<Vec<_>>().join(" ")
}

fn svg_stroke(stroke: Option<Stroke>) -> String {
    match stroke {
        Some(s) => format!(" stroke=\"{}\" stroke-width=\"{}\" stroke-linecap=\"round\" stroke-linejoin=\"round\"", svg_color(s.color), s.width),
        None => String::new(),
    }
}

fn svg_element(p: &Primitive) -> String {
    match p {
        Primitive::Line { from, to, stroke } => format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"{}/>\n",
            from.x,
            from.y,
            to.x,
            to.y,
            svg_stroke(Some(*stroke))
        ),
        Primitive::Polyline { points, closed, stroke } => format!(
            "<{} points=\"{}\" fill=\"none\"{}/>\n",
            if *closed { "polygon" } else { "polyline" },
            svg_points(points),
            svg_stroke(Some(*stroke))
        ),
        Primitive::Circle { center, radius, fill, stroke } => format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"{}/>\n",
            center.x,
            center.y,
            radius,
            fill.map(svg_color).unwrap_or_else(|| "none".into()),
            svg_stroke(*stroke)
        ),
        Primitive::Polygon { points, fill, stroke } => format!(
            "<polygon points=\"{}\" fill=\"{}\" fill-rule=\"evenodd\"{}/>\n",
            svg_points(points),
            fill.map(svg_color).unwrap_or_else(|| "none".into()),
            svg_stroke(*stroke)
        ),
        Primitive::Raster { origin, width, height, tile } => {
            let png = encode_png(&tile.to_image());
            format!(
                "<image x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" preserveAspectRatio=\"none\" href=\"data:image/png;base64,{}\"/>\n",
                origin.x,
                origin.y,
                width,
                height,
                base64::engine::general_purpose::STANDARD.encode(png)
            )
        }
        Primitive::Text { text, center, size, quarter_turns, stroke } => {
            let mut s = String::new();
            for line in font::layout(text, *center, *size, *quarter_turns) {
                s.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\"{}/>\n",
                    svg_points(&line),
                    svg_stroke(Some(*stroke))
                ));
            }
            s
        }
    }
}

/// Rasterizes `scene` at `width_px x height_px`.
pub fn render(scene: &Scene, width_px: u32, height_px: u32) -> Result<Image> {
    if width_px == 0 || height_px == 0 {
        return Err(Error::Render(format!("zero-area canvas {width_px}x{height_px}")));
    }
    if scene.width <= 0.0 || scene.height <= 0.0 {
        return Err(Error::Render("scene view box has no area".into()));
    }
    let mut canvas = Canvas::new(width_px, height_px, scene.background);
    let sx = width_px as f64 / scene.width;
    let sy = height_px as f64 / scene.height;
    let sw = (sx + sy) / 2.0;
    let map = |p: &Point| Point::new(p.x * sx, p.y * sy);
    for item in sorted(&scene.items) {
        match &item.primitive {
            Primitive::Line { from, to, stroke } => canvas.line(map(from), map(to), stroke.width * sw, stroke.color),
            Primitive::Polyline { points, closed, stroke } => {
                let pts: Vec<Point> = points.iter().map(map).collect();
                canvas.polyline(&pts, *closed, stroke.width * sw, stroke.color);
            }
            Primitive::Circle { center, radius, fill, stroke } => {
                let c = map(center);
                if let Some(f) = fill {
                    canvas.disc(c, radius * sw, *f);
                }
                if let Some(s) = stroke {
                    canvas.ring(c, radius * sw, s.width * sw, s.color);
                }
            }
            Primitive::Polygon { points, fill, stroke } => {
                let pts: Vec<Point> = points.iter().map(map).collect();
                if let Some(f) = fill {
                    canvas.fill_polygon(&pts, *f);
                }
                if let Some(s) = stroke {
                    canvas.polyline(&pts, true, s.width * sw, s.color);
                }
            }
            Primitive::Raster { origin, width, height, tile } => {
                canvas.blit(&tile.to_image(), map(origin), width * sx, height * sy);
            }
            Primitive::Text { text, center, size, quarter_turns, stroke } => {
                for line in font::layout(text, *center, *size, *quarter_turns) {
                    let pts: Vec<Point> = line.iter().map(map).collect();
                    canvas.polyline(&pts, false, stroke.width * sw, stroke.color);
                }
            }
        }
    }
    Ok(canvas.into_image())
}

/// Renders at one pixel per view-box unit.
pub fn render_native(scene: &Scene) -> Result<Image> {
    render(scene, scene.width.round() as u32, scene.height.round() as u32)
}

pub fn encode_png(img: &Image) -> Vec<u8> {
    let mut buf = Vec::new();
    let enc = image::codecs::png::PngEncoder::new(&mut buf);
    img.write_with_encoder(enc).expect("png encoding into memory");
    buf
}

pub fn decode_png(bytes: &[u8]) -> Result<Image> {
    image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map(|i| i.to_luma8())
        .map_err(|e| Error::Render(e.to_string()))
}

/// Pixel-space drawing surface.
pub struct Canvas {
    img: Image,
}

impl Canvas {
    pub fn new(width: u32, height: u32, background: Color) -> Self {
        Self {
            img: GrayImage::from_pixel(width, height, Luma([background.0])),
        }
    }

    pub fn from_image(img: Image) -> Self {
        Self { img }
    }

    pub fn into_image(self) -> Image {
        self.img
    }

    pub fn image(&self) -> &Image {
        &self.img
    }

    fn bounds(&self, min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Option<(u32, u32, u32, u32)> {
        let w = self.img.width() as f64;
        let h = self.img.height() as f64;
        let x0 = (min_x - 0.5).floor().max(0.0);
        let y0 = (min_y - 0.5).floor().max(0.0);
        let x1 = (max_x + 0.5).ceil().min(w - 1.0);
        let y1 = (max_y + 0.5).ceil().min(h - 1.0);
        if x0 > x1 || y0 > y1 {
            return None;
        }
        Some((x0 as u32, y0 as u32, x1 as u32, y1 as u32))
    }

    fn cover(&mut self, min: Point, max: Point, color: Color, inside: impl Fn(Point) -> bool) {
        if let Some((x0, y0, x1, y1)) = self.bounds(min.x, min.y, max.x, max.y) {
            for py in y0..=y1 {
                for px in x0..=x1 {
                    let c = Point::new(px as f64 + 0.5, py as f64 + 0.5);
                    if inside(c) {
                        self.img.put_pixel(px, py, Luma([color.0]));
                    }
                }
            }
        }
    }

    /// Round-capped thick segment.
    pub fn line(&mut self, a: Point, b: Point, width: f64, color: Color) {
        let r = (width / 2.0).max(0.5);
        let d = b.sub(a);
        let len2 = d.dot(d);
        let min = Point::new(a.x.min(b.x) - r, a.y.min(b.y) - r);
        let max = Point::new(a.x.max(b.x) + r, a.y.max(b.y) + r);
        self.cover(min, max, color, |p| {
            let t = if len2 == 0.0 { 0.0 } else { (p.sub(a).dot(d) / len2).clamp(0.0, 1.0) };
            p.dist(a.add(d.scale(t))) <= r
        });
    }

    pub fn polyline(&mut self, pts: &[Point], closed: bool, width: f64, color: Color) {
        for w in pts.windows(2) {
            self.line(w[0], w[1], width, color);
        }
        if closed && pts.len() > 2 {
            self.line(pts[pts.len() - 1], pts[0], width, color);
        }
    }

    pub fn disc(&mut self, c: Point, r: f64, color: Color) {
        let min = Point::new(c.x - r, c.y - r);
        let max = Point::new(c.x + r, c.y + r);
        self.cover(min, max, color, |p| p.dist(c) <= r);
    }

    pub fn ring(&mut self, c: Point, r: f64, width: f64, color: Color) {
        let h = (width / 2.0).max(0.5);
        let min = Point::new(c.x - r - h, c.y - r - h);
        let max = Point::new(c.x + r + h, c.y + r + h);
        self.cover(min, max, color, |p| (p.dist(c) - r).abs() <= h);
    }

    pub fn rect(&mut self, min: Point, max: Point, color: Color) {
        self.cover(min, max, color, |p| p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y);
    }

    /// Even-odd scanline fill.
    pub fn fill_polygon(&mut self, pts: &[Point], color: Color) {
        if pts.len() < 3 {
            return;
        }
        let min_y = pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let max_y = pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        let h = self.img.height() as f64;
        let w = self.img.width();
        let y0 = (min_y - 0.5).ceil().max(0.0) as i64;
        let y1 = ((max_y - 0.5).floor()).min(h - 1.0) as i64;
        let n = pts.len();
        let mut xs: Vec<f64> = Vec::with_capacity(8);
        for py in y0..=y1 {
            let y = py as f64 + 0.5;
            xs.clear();
            for i in 0..n {
                let a = pts[i];
                let b = pts[(i + 1) % n];
                if (a.y > y) != (b.y > y) {
                    xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
                }
            }
            xs.sort_by(|p, q| p.total_cmp(q));
            for pair in xs.chunks(2) {
                if pair.len() < 2 {
                    break;
                }
                let start = (pair[0] - 0.5).ceil().max(0.0) as i64;
                let end = ((pair[1] - 0.5).floor() as i64).min(w as i64 - 1);
                for px in start..=end {
                    self.img.put_pixel(px as u32, py as u32, Luma([color.0]));
                }
            }
        }
    }

    /// Nearest-neighbour copy of `src` into the pixel rectangle at `origin`.
    pub fn blit(&mut self, src: &Image, origin: Point, width: f64, height: f64) {
        if width <= 0.0 || height <= 0.0 {
            return;
        }
        let (sw, sh) = (src.width() as f64, src.height() as f64);
        let max = Point::new(origin.x + width, origin.y + height);
        if let Some((x0, y0, x1, y1)) = self.bounds(origin.x, origin.y, max.x, max.y) {
            for py in y0..=y1 {
                for px in x0..=x1 {
                    let cx = px as f64 + 0.5;
                    let cy = py as f64 + 0.5;
                    if cx < origin.x || cy < origin.y || cx >= max.x || cy >= max.y {
                        continue;
                    }
                    let sx = (((cx - origin.x) / width) * sw).floor().min(sw - 1.0) as u32;
                    let sy = (((cy - origin.y) / height) * sh).floor().min(sh - 1.0) as u32;
                    self.img.put_pixel(px, py, *src.get_pixel(sx, sy));
                }
            }
        }
    }
}

pub fn count_pixels(img: &Image, pred: impl Fn(u8) -> bool) -> usize {
    img.pixels().filter(|p| pred(p.0[0])).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn empty_scene_is_white() {
        let img = render(&Scene::new(100.0, 100.0), 100, 100).unwrap();
        assert_eq!(img.dimensions(), (100, 100));
        assert!(img.pixels().all(|p| p.0[0] == 255));
    }

    #[test]
    fn zero_area_is_an_error() {
        assert!(render(&Scene::new(10.0, 10.0), 0, 10).is_err());
        assert!(render(&Scene::new(10.0, 10.0), 10, 0).is_err());
    }

    #[test]
    fn unit_line_marks_pixels() {
        let mut s = Scene::new(10.0, 10.0);
        s.line(Point::new(2.0, 5.0), Point::new(3.0, 5.0), 1.0);
        let img = render(&s, 10, 10).unwrap();
        // Pixel centres (2.5, 4.5) and (2.5, 5.5) lie within half a unit of the segment.
        assert_eq!(count_pixels(&img, |v| v == 0), 2);
    }

    fn random_scene(rng: &mut SeededRng) -> Scene {
        let mut s = Scene::new(600.0, 600.0);
        let p = |rng: &mut SeededRng| Point::new(rng.unit() * 600.0, rng.unit() * 600.0);
        for _ in 0..(1 + rng.index(8)) {
            match rng.index(5) {
                0 => {
                    let (a, b) = (p(rng), p(rng));
                    s.line(a, b, 1.0 + rng.unit() * 6.0);
                }
                1 => {
                    let c = p(rng);
                    s.ring(c, 5.0 + rng.unit() * 60.0, 3.0);
                }
                2 => {
                    let pts = vec![p(rng), p(rng), p(rng), p(rng)];
                    s.push(rng.index(3) as i32 - 1, Primitive::Polygon { points: pts, fill: Some(Color(rng.index(256) as u8)), stroke: None });
                }
                3 => {
                    let c = p(rng);
                    s.text("Ab3", c, 10.0 + rng.unit() * 40.0, 2.0);
                }
                _ => {
                    let tile = Tile { width: 2, height: 2, pixels: vec![0, 255, 255, 0] };
                    let o = p(rng);
                    s.push(0, Primitive::Raster { origin: o, width: 50.0, height: 40.0, tile });
                }
            }
        }
        s
    }

    #[test]
    fn rendering_is_bit_stable() {
        let mut rng = SeededRng::new(5);
        for _ in 0..100 {
            let s = random_scene(&mut rng);
            let a = encode_png(&render(&s, 120, 120).unwrap());
            let b = encode_png(&render(&s, 120, 120).unwrap());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn scene_text_round_trip() {
        let mut rng = SeededRng::new(9);
        let s = random_scene(&mut rng);
        let text = s.to_text();
        assert!(text.contains("\"version\": 1"));
        let back = Scene::from_text(&text).unwrap();
        assert_eq!(back, s);
        assert!(s.to_svg().starts_with("<svg"));
    }

    #[test]
    fn layers_draw_in_order() {
        let mut s = Scene::new(10.0, 10.0);
        s.push(2, Primitive::Polygon {
            points: vec![Point::new(0., 0.), Point::new(10., 0.), Point::new(10., 10.), Point::new(0., 10.)],
            fill: Some(Color::WHITE),
            stroke: None,
        });
        s.push(1, Primitive::Circle { center: Point::new(5., 5.), radius: 3.0, fill: Some(Color::BLACK), stroke: None });
        let img = render(&s, 10, 10).unwrap();
        assert!(img.pixels().all(|p| p.0[0] == 255));
    }
}

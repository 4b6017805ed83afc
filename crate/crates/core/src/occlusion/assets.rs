//! Bundled silhouette corpus, parsed from a small shape description language.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Canvas, Color, Image, Point};

const SOURCE: &str = include_str!("../../assets/silhouettes.txt");

/// Side length of the drawing coordinate system.
pub const DESIGN_SIZE: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Disc { c: Point, r: f64 },
    Ring { c: Point, r: f64, w: f64 },
    Ellipse { c: Point, rx: f64, ry: f64, deg: f64 },
    Sector { c: Point, r: f64, a0: f64, a1: f64 },
    Arc { c: Point, r: f64, a0: f64, a1: f64, w: f64 },
    Rect { min: Point, max: Point },
    Poly { points: Vec<Point> },
    Path { w: f64, points: Vec<Point> },
    Line { a: Point, b: Point, w: f64 },
    Rays { c: Point, r0: f64, r1: f64, n: usize, w: f64 },
    Star { c: Point, outer: f64, inner: f64, n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Paint {
    pub white: bool,
    pub shape: Shape,
}

/// A labelled black-on-white object drawing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilhouetteAsset {
    pub label: String,
    pub aliases: Vec<String>,
    pub paints: Vec<Paint>,
}

impl SilhouetteAsset {
    /// Rasterizes the drawing onto a `px x px` white canvas.
    pub fn image(&self, px: u32) -> Image {
        let mut canvas = Canvas::new(px, px, Color::WHITE);
        let k = px as f64 / DESIGN_SIZE;
        for paint in &self.paints {
            let color = if paint.white { Color::WHITE } else { Color::BLACK };
            draw(&mut canvas, &paint.shape, k, color);
        }
        canvas.into_image()
    }

    pub fn accepts(&self, answer: &str) -> bool {
        let a = answer.trim().to_lowercase();
        self.aliases.contains(&a)
    }
}

fn polar(c: Point, r: f64, deg: f64) -> Point {
    let t = deg.to_radians();
    Point::new(c.x + r * t.cos(), c.y - r * t.sin())
}

fn arc_points(c: Point, r: f64, a0: f64, a1: f64) -> Vec<Point> {
    let steps = (((a1 - a0).abs() / 5.0).ceil() as usize).max(2);
    (0..=steps).map(|i| polar(c, r, a0 + (a1 - a0) * i as f64 / steps as f64)).collect()
}

fn draw(canvas: &mut Canvas, shape: &Shape, k: f64, color: Color) {
    let s = |p: &Point| p.scale(k);
    match shape {
        Shape::Disc { c, r } => canvas.disc(s(c), r * k, color),
        Shape::Ring { c, r, w } => canvas.ring(s(c), r * k, w * k, color),
        Shape::Ellipse { c, rx, ry, deg } => {
            let t = deg.to_radians();
            let pts: Vec<Point> = (0..72)
                .map(|i| {
                    let u = i as f64 * std::f64::consts::TAU / 72.0;
                    let local = Point::new(rx * u.cos(), -ry * u.sin());
                    let rot = Point::new(local.x * t.cos() + local.y * t.sin(), -local.x * t.sin() + local.y * t.cos());
                    s(&c.add(rot))
                })
                .collect();
            canvas.fill_polygon(&pts, color);
        }
        Shape::Sector { c, r, a0, a1 } => {
            let mut pts = vec![s(c)];
            pts.extend(arc_points(*c, *r, *a0, *a1).iter().map(s));
            canvas.fill_polygon(&pts, color);
        }
        Shape::Arc { c, r, a0, a1, w } => {
            let pts: Vec<Point> = arc_points(*c, *r, *a0, *a1).iter().map(s).collect();
            canvas.polyline(&pts, false, w * k, color);
        }
        Shape::Rect { min, max } => canvas.rect(s(min), s(max), color),
        Shape::Poly { points } => canvas.fill_polygon(&points.iter().map(s).collect::<Vec<_>>(), color),
        Shape::Path { w, points } => canvas.polyline(&points.iter().map(s).collect::<Vec<_>>(), false, w * k, color),
        Shape::Line { a, b, w } => canvas.line(s(a), s(b), w * k, color),
        Shape::Rays { c, r0, r1, n, w } => {
            for i in 0..*n {
                let deg = 360.0 * i as f64 / *n as f64;
                canvas.line(s(&polar(*c, *r0, deg)), s(&polar(*c, *r1, deg)), w * k, color);
            }
        }
        Shape::Star { c, outer, inner, n } => {
            let pts: Vec<Point> = (0..2 * n)
                .map(|i| {
                    let r = if i % 2 == 0 { *outer } else { *inner };
                    s(&polar(*c, r, 90.0 + 180.0 * i as f64 / *n as f64))
                })
                .collect();
            canvas.fill_polygon(&pts, color);
        }
    }
}

fn points(v: &[f64], line: usize) -> Result<Vec<Point>> {
    if v.len() < 4 || !v.len().is_multiple_of(2) {
        return Err(Error::param(format!("silhouette line {line}: expected coordinate pairs")));
    }
    Ok(v.chunks(2).map(|p| Point::new(p[0], p[1])).collect())
}

fn parse_shape(line_no: usize, text: &str) -> Result<Paint> {
    let (white, body) = match text.strip_prefix('!') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let mut parts = body.split_whitespace();
    let op = parts.next().unwrap_or_default();
    let v: Vec<f64> = parts
        .map(|t| t.parse::<f64>().map_err(|_| Error::param(format!("silhouette line {line_no}: bad number `{t}`"))))
        .collect::<Result<_>>()?;
    let need = |n: usize| -> Result<()> {
        if v.len() == n {
            Ok(())
        } else {
            Err(Error::param(format!("silhouette line {line_no}: `{op}` takes {n} numbers, got {}", v.len())))
        }
    };
    let p = |i: usize| Point::new(v[i], v[i + 1]);
    let shape = match op {
        "disc" => {
            need(3)?;
            Shape::Disc { c: p(0), r: v[2] }
        }
        "ring" => {
            need(4)?;
            Shape::Ring { c: p(0), r: v[2], w: v[3] }
        }
        "ellipse" => {
            if v.len() == 4 {
                Shape::Ellipse { c: p(0), rx: v[2], ry: v[3], deg: 0.0 }
            } else {
                need(5)?;
                Shape::Ellipse { c: p(0), rx: v[2], ry: v[3], deg: v[4] }
            }
        }
        "sector" => {
            need(5)?;
            Shape::Sector { c: p(0), r: v[2], a0: v[3], a1: v[4] }
        }
        "arc" => {
            need(6)?;
            Shape::Arc { c: p(0), r: v[2], a0: v[3], a1: v[4], w: v[5] }
        }
        "rect" => {
            need(4)?;
            Shape::Rect { min: p(0), max: p(2) }
        }
        "poly" => Shape::Poly { points: points(&v, line_no)? },
        "path" => {
            if v.is_empty() {
                return Err(Error::param(format!("silhouette line {line_no}: path needs a width")));
            }
            Shape::Path { w: v[0], points: points(&v[1..], line_no)? }
        }
        "line" => {
            need(5)?;
            Shape::Line { a: p(0), b: p(2), w: v[4] }
        }
        "rays" => {
            need(6)?;
            Shape::Rays { c: p(0), r0: v[2], r1: v[3], n: v[4] as usize, w: v[5] }
        }
        "star" => {
            need(5)?;
            Shape::Star { c: p(0), outer: v[2], inner: v[3], n: v[4] as usize }
        }
        other => return Err(Error::param(format!("silhouette line {line_no}: unknown shape `{other}`"))),
    };
    Ok(Paint { white, shape })
}

/// Parses a silhouette description file.
pub fn parse_catalog(text: &str) -> Result<Vec<SilhouetteAsset>> {
    let mut out: Vec<SilhouetteAsset> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        if raw.starts_with(char::is_whitespace) {
            let asset = out
                .last_mut()
                .ok_or_else(|| Error::param(format!("silhouette line {line_no}: shape before any header")))?;
            asset.paints.push(parse_shape(line_no, raw.trim())?);
        } else {
            let (label, aliases) = raw
                .split_once(':')
                .ok_or_else(|| Error::param(format!("silhouette line {line_no}: header needs `label: aliases`")))?;
            let label = label.trim().to_lowercase();
            if label.is_empty() {
                return Err(Error::param(format!("silhouette line {line_no}: empty label")));
            }
            let mut all = vec![label.clone()];
            for a in aliases.split(',').map(|a| a.trim().to_lowercase()).filter(|a| !a.is_empty()) {
                if !all.contains(&a) {
                    all.push(a);
                }
            }
            out.push(SilhouetteAsset { label, aliases: all, paints: Vec::new() });
        }
    }
    if let Some(empty) = out.iter().find(|a| a.paints.is_empty()) {
        return Err(Error::param(format!("silhouette `{}` has no shapes", empty.label)));
    }
    Ok(out)
}

/// The bundled corpus.
pub fn catalog() -> &'static [SilhouetteAsset] {
    static CATALOG: OnceLock<Vec<SilhouetteAsset>> = OnceLock::new();
    CATALOG.get_or_init(|| parse_catalog(SOURCE).expect("bundled silhouettes parse"))
}

pub fn find(label: &str) -> Option<&'static SilhouetteAsset> {
    catalog().iter().find(|a| a.label == label)
}

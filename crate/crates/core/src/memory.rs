//! Associative-memory items (MA1): picture-number study sheets and probes.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::closure::{gen_cf2, PatternGraph};
use crate::difficulty::Difficulty;
use crate::error::{Error, Result};
use crate::geometry::{font, render, Canvas, Color, EdgeSet, Image, Point, Primitive, Scene, Stroke};
use crate::occlusion::assets::{catalog, find};
use crate::rng::SeededRng;
use crate::spatial::card::{gen_s1_polygon, PolygonParams};

pub const MAX_PAIRS: usize = 90;
pub const TILE_PX: u32 = 120;
const GAP: u32 = 12;
const NUMBER_W: u32 = 64;
const PAD: u32 = 24;
const NUMBER_SIZE: f64 = 34.0;
const NUMBER_STROKE: f64 = 4.0;
const PATTERN_NODES: usize = 4;
const PATTERN_STROKE: f64 = 8.0;
const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TileSource {
    #[default]
    Semantic,
    Pattern,
    Shape,
}

impl std::str::FromStr for TileSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semantic" => Ok(TileSource::Semantic),
            "pattern" | "cf2" => Ok(TileSource::Pattern),
            "shape" | "abstract" => Ok(TileSource::Shape),
            other => Err(Error::param(format!("unknown tile source `{other}`"))),
        }
    }
}

/// Enough to redraw a tile without any randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TileSpec {
    Semantic { label: String },
    Pattern { edges: EdgeSet },
    Shape { vertices: Vec<Point> },
}

impl TileSpec {
    pub fn image(&self) -> Result<Image> {
        match self {
            TileSpec::Semantic { label } => find(label)
                .map(|a| a.image(TILE_PX))
                .ok_or_else(|| Error::ItemDefinition(format!("unknown silhouette `{label}`"))),
            TileSpec::Pattern { edges } => {
                let g = PatternGraph { rows: PATTERN_NODES, cols: PATTERN_NODES, edges: edges.clone() };
                let mut scene = g.scene();
                for item in &mut scene.items {
                    if let Primitive::Line { stroke, .. } = &mut item.primitive {
                        stroke.width = PATTERN_STROKE;
                    }
                }
                render(&scene, TILE_PX, TILE_PX)
            }
            TileSpec::Shape { vertices } => {
                let mut s = Scene::new(600.0, 600.0);
                let pts = vertices.iter().map(|p| Point::new(300.0 + p.x * 260.0, 300.0 - p.y * 260.0)).collect();
                s.push(0, Primitive::Polygon { points: pts, fill: Some(Color::GRAY), stroke: Some(Stroke::black(8.0)) });
                render(&s, TILE_PX, TILE_PX)
            }
        }
    }
}

/// Grid with `r * c >= n`, minimising `|r - c|`, then `r * c`, then `r`.
pub fn grid_for(n: usize) -> (usize, usize) {
    (1..=n.max(1))
        .flat_map(|r| (1..=n.max(1)).map(move |c| (r, c)))
        .filter(|&(r, c)| r * c >= n)
        .min_by_key(|&(r, c)| (r.abs_diff(c), r * c, r))
        .expect("1x1 grid always exists for n <= 1")
}

pub fn pair_count(d: Difficulty) -> usize {
    d.pick(10, 21, 50)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ma1Item {
    pub source: TileSource,
    pub rows: usize,
    pub cols: usize,
    /// Row-major pairs.
    pub tiles: Vec<TileSpec>,
    pub numbers: Vec<u8>,
    pub probe: usize,
}

impl Ma1Item {
    pub fn n(&self) -> usize {
        self.tiles.len()
    }

    pub fn answer(&self) -> u8 {
        self.numbers[self.probe]
    }

    pub fn probe_image(&self) -> Result<Image> {
        self.tiles[self.probe].image()
    }

    pub fn cell_size() -> (u32, u32) {
        (TILE_PX + GAP + NUMBER_W + PAD, TILE_PX + PAD)
    }

    /// Top-left pixel of tile `i` on the sheet.
    pub fn tile_origin(&self, i: usize) -> (u32, u32) {
        let (cw, ch) = Self::cell_size();
        let (r, c) = (i / self.cols, i % self.cols);
        (PAD / 2 + c as u32 * cw, PAD / 2 + r as u32 * ch)
    }

    pub fn sheet_image(&self) -> Result<Image> {
        let (cw, ch) = Self::cell_size();
        let mut canvas = Canvas::new(cw * self.cols as u32 + PAD, ch * self.rows as u32 + PAD, Color::WHITE);
        for (i, (tile, number)) in self.tiles.iter().zip(&self.numbers).enumerate() {
            let (x, y) = self.tile_origin(i);
            let o = Point::new(x as f64, y as f64);
            canvas.blit(&tile.image()?, o, TILE_PX as f64, TILE_PX as f64);
            let center = Point::new(o.x + (TILE_PX + GAP) as f64 + NUMBER_W as f64 / 2.0, o.y + TILE_PX as f64 / 2.0);
            for stroke in font::layout(&number.to_string(), center, NUMBER_SIZE, 0) {
                canvas.polyline(&stroke, false, NUMBER_STROKE, Color::BLACK);
            }
        }
        Ok(canvas.into_image())
    }

    pub fn verify(&self) -> bool {
        let n = self.n();
        let numbers: BTreeSet<u8> = self.numbers.iter().copied().collect();
        (1..=MAX_PAIRS).contains(&n)
            && self.numbers.len() == n
            && numbers.len() == n
            && numbers.iter().all(|k| (10..=99).contains(k))
            && (self.rows, self.cols) == grid_for(n)
            && self.probe < n
            && distinct_tiles(&self.tiles)
    }
}

fn distinct_tiles(tiles: &[TileSpec]) -> bool {
    let mut seen = BTreeSet::new();
    tiles.iter().all(|t| t.image().map(|img| seen.insert(img.into_raw())).unwrap_or(false))
}

fn sample_tiles(n: usize, source: TileSource, rng: &mut SeededRng) -> Result<Vec<TileSpec>> {
    match source {
        TileSource::Semantic => {
            let cat = catalog();
            if n > cat.len() {
                return Err(Error::param(format!("{n} pairs exceed the {} available silhouettes", cat.len())));
            }
            Ok(cat.choose_multiple(rng, n).map(|a| TileSpec::Semantic { label: a.label.clone() }).collect())
        }
        TileSource::Pattern => {
            let mut seen = BTreeSet::new();
            let mut out = Vec::with_capacity(n);
            for _ in 0..MAX_ATTEMPTS * n {
                if out.len() == n {
                    break;
                }
                let g = gen_cf2(PATTERN_NODES, PATTERN_NODES, 0.45, 0.05, rng)?;
                if seen.insert(g.edges.clone()) {
                    out.push(TileSpec::Pattern { edges: g.edges });
                }
            }
            if out.len() < n {
                return Err(Error::GenerationFailed { what: "MA1 pattern tiles", seed: rng.seed(), attempts: MAX_ATTEMPTS * n });
            }
            Ok(out)
        }
        TileSource::Shape => {
            let params = PolygonParams::default();
            (0..n).map(|_| gen_s1_polygon(&params, rng).map(|p| TileSpec::Shape { vertices: p.vertices })).collect()
        }
    }
}

/// A study sheet of `n` picture-number pairs plus one probe.
pub fn gen_ma1(n: usize, source: TileSource, rng: &mut SeededRng) -> Result<Ma1Item> {
    if !(1..=MAX_PAIRS).contains(&n) {
        return Err(Error::param(format!("pair count {n} outside 1..={MAX_PAIRS}")));
    }
    let (rows, cols) = grid_for(n);
    let mut tiles = sample_tiles(n, source, rng)?;
    tiles.shuffle(rng);
    let mut pool: Vec<u8> = (10..=99).collect();
    pool.shuffle(rng);
    let numbers = pool[..n].to_vec();
    let probe = rng.index(n);
    Ok(Ma1Item { source, rows, cols, tiles, numbers, probe })
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::GenericImageView;

    #[test]
    fn grid_is_minimal_against_brute_force() {
        for n in 1..=MAX_PAIRS {
            let (r, c) = grid_for(n);
            assert!(r * c >= n);
            for r2 in 1..=100 {
                for c2 in 1..=100 {
                    if r2 * c2 >= n {
                        assert!(r2.abs_diff(c2) >= r.abs_diff(c), "n={n}");
                    }
                }
            }
        }
        assert_eq!(grid_for(21), (5, 5));
        assert_eq!(grid_for(1), (1, 1));
        assert_eq!(grid_for(10), (4, 4));
        assert_eq!(grid_for(50), (8, 8));
        assert_eq!(grid_for(90), (10, 10));
    }

    #[test]
    fn single_pair_sheet() {
        let item = gen_ma1(1, TileSource::Semantic, &mut SeededRng::new(3)).unwrap();
        assert_eq!((item.rows, item.cols), (1, 1));
        assert_eq!(item.answer(), item.numbers[0]);
        assert!(item.verify());
    }

    #[test]
    fn bounds_are_parameter_errors() {
        let mut rng = SeededRng::new(0);
        assert!(matches!(gen_ma1(0, TileSource::Shape, &mut rng), Err(Error::Parameter(_))));
        assert!(matches!(gen_ma1(91, TileSource::Shape, &mut rng), Err(Error::Parameter(_))));
        assert!(matches!(gen_ma1(89, TileSource::Semantic, &mut rng), Err(Error::Parameter(_))));
        assert!(gen_ma1(90, TileSource::Pattern, &mut rng).unwrap().verify());
    }

    #[test]
    fn sweep_sizes_hold_invariants() {
        for n in [10, 20, 40, 80] {
            for seed in 0..100 {
                let source = [TileSource::Semantic, TileSource::Pattern, TileSource::Shape][seed as usize % 3];
                let item = gen_ma1(n, source, &mut SeededRng::new(seed)).unwrap();
                let numbers: BTreeSet<u8> = item.numbers.iter().copied().collect();
                assert_eq!(numbers.len(), n);
                assert_eq!((item.rows, item.cols), grid_for(n));
                assert!(item.probe < n);
            }
        }
    }

    #[test]
    fn probe_matches_exactly_one_sheet_tile() {
        for (seed, source) in [(1, TileSource::Semantic), (2, TileSource::Pattern), (3, TileSource::Shape)] {
            let item = gen_ma1(12, source, &mut SeededRng::new(seed)).unwrap();
            assert!(item.verify());
            let sheet = item.sheet_image().unwrap();
            let probe = item.probe_image().unwrap();
            let hits: Vec<usize> = (0..item.n())
                .filter(|&i| {
                    let (x, y) = item.tile_origin(i);
                    sheet.view(x, y, TILE_PX, TILE_PX).to_image() == probe
                })
                .collect();
            assert_eq!(hits, vec![item.probe]);
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let a = gen_ma1(21, TileSource::Pattern, &mut SeededRng::new(77)).unwrap();
        let b = gen_ma1(21, TileSource::Pattern, &mut SeededRng::new(77)).unwrap();
        assert_eq!(a, b);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<Ma1Item>(&json).unwrap(), a);
    }
}

//! A fixed single-stroke vector font.
//!
//! Glyphs live in a 4 x 6 cap box (y grows downward, baseline at 6,
//! x-height at 2, descenders to 8). The twofold cube symbols
//! (N, S, Z, H, I, X) are point-symmetric about the box centre (2, 3) and
//! `O` and `+` are symmetric under quarter turns.

use crate::geometry::plane::Point;

pub const CAP_HEIGHT: f64 = 6.0;
pub const GLYPH_WIDTH: f64 = 4.0;
pub const ADVANCE: f64 = 6.0;

type Stroke = &'static [(f64, f64)];

const CIRCLE: [(f64, f64); 17] = {
    // 16-gon of radius 2.5 about (2, 3), vertices at multiples of 22.5 degrees.
    const C: [(f64, f64); 4] = [(1.0, 0.0), (0.923_879_532_5, 0.382_683_432_4), (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2), (0.382_683_432_4, 0.923_879_532_5)];
    let mut out = [(0.0, 0.0); 17];
    let mut k = 0;
    while k < 16 {
        let (cx, sy) = C[k % 4];
        let (dx, dy) = match k / 4 {
            0 => (cx, sy),
            1 => (-sy, cx),
            2 => (-cx, -sy),
            _ => (sy, -cx),
        };
        out[k] = (2.0 + 2.5 * dx, 3.0 + 2.5 * dy);
        k += 1;
    }
    out[16] = out[0];
    out
};

const Q_TAIL: [(f64, f64); 2] = [(2.5, 4.5), (4.5, 6.5)];

pub fn glyph(c: char) -> &'static [Stroke] {
    match c {
        'A' => &[&[(0., 6.), (2., 0.), (4., 6.)], &[(0.667, 4.), (3.333, 4.)]],
        'B' => &[
            &[(0., 0.), (0., 6.), (3., 6.), (4., 5.), (4., 4.), (3., 3.), (0., 3.)],
            &[(0., 0.), (3., 0.), (4., 1.), (4., 2.), (3., 3.)],
        ],
        'C' => &[&[(4., 1.), (3., 0.), (1., 0.), (0., 1.), (0., 5.), (1., 6.), (3., 6.), (4., 5.)]],
        'D' => &[&[(0., 0.), (0., 6.), (2., 6.), (4., 4.), (4., 2.), (2., 0.), (0., 0.)]],
        'E' => &[&[(4., 0.), (0., 0.), (0., 6.), (4., 6.)], &[(0., 3.), (3., 3.)]],
        'F' => &[&[(4., 0.), (0., 0.), (0., 6.)], &[(0., 3.), (3., 3.)]],
        'G' => &[&[(4., 1.), (3., 0.), (1., 0.), (0., 1.), (0., 5.), (1., 6.), (3., 6.), (4., 5.), (4., 3.), (2., 3.)]],
        'H' => &[&[(0., 0.), (0., 6.)], &[(4., 0.), (4., 6.)], &[(0., 3.), (4., 3.)]],
        'I' => &[&[(2., 0.), (2., 6.)], &[(1., 0.), (3., 0.)], &[(1., 6.), (3., 6.)]],
        'J' => &[&[(1., 0.), (4., 0.)], &[(3., 0.), (3., 5.), (2., 6.), (1., 6.), (0., 5.)]],
        'K' => &[&[(0., 0.), (0., 6.)], &[(4., 0.), (0., 4.)], &[(1.333, 3.), (4., 6.)]],
        'L' => &[&[(0., 0.), (0., 6.), (4., 6.)]],
        'M' => &[&[(0., 6.), (0., 0.), (2., 3.), (4., 0.), (4., 6.)]],
        'N' => &[&[(0., 6.), (0., 0.), (4., 6.), (4., 0.)]],
        'O' => &[&CIRCLE],
        'P' => &[&[(0., 6.), (0., 0.), (3., 0.), (4., 1.), (4., 2.), (3., 3.), (0., 3.)]],
        'Q' => &[&CIRCLE, &Q_TAIL],
        'R' => &[&[(0., 6.), (0., 0.), (3., 0.), (4., 1.), (4., 2.), (3., 3.), (0., 3.)], &[(2., 3.), (4., 6.)]],
        'S' => &[&[(4., 1.), (3., 0.), (1., 0.), (0., 1.), (0., 2.), (1., 3.), (3., 3.), (4., 4.), (4., 5.), (3., 6.), (1., 6.), (0., 5.)]],
        'T' => &[&[(0., 0.), (4., 0.)], &[(2., 0.), (2., 6.)]],
        'U' => &[&[(0., 0.), (0., 5.), (1., 6.), (3., 6.), (4., 5.), (4., 0.)]],
        'V' => &[&[(0., 0.), (2., 6.), (4., 0.)]],
        'W' => &[&[(0., 0.), (1., 6.), (2., 2.), (3., 6.), (4., 0.)]],
        'X' => &[&[(0., 0.), (4., 6.)], &[(4., 0.), (0., 6.)]],
        'Y' => &[&[(0., 0.), (2., 3.), (4., 0.)], &[(2., 3.), (2., 6.)]],
        'Z' => &[&[(0., 0.), (4., 0.), (0., 6.), (4., 6.)]],
        '0' => &[&[(1., 0.), (3., 0.), (4., 1.), (4., 5.), (3., 6.), (1., 6.), (0., 5.), (0., 1.), (1., 0.)], &[(3.5, 1.), (0.5, 5.)]],
        '1' => &[&[(1., 1.), (2., 0.), (2., 6.)], &[(1., 6.), (3., 6.)]],
        '2' => &[&[(0., 1.), (1., 0.), (3., 0.), (4., 1.), (4., 2.), (0., 6.), (4., 6.)]],
        '3' => &[
            &[(0., 1.), (1., 0.), (3., 0.), (4., 1.), (4., 2.), (3., 3.), (1., 3.)],
            &[(3., 3.), (4., 4.), (4., 5.), (3., 6.), (1., 6.), (0., 5.)],
        ],
        '4' => &[&[(3., 6.), (3., 0.), (0., 4.), (4., 4.)]],
        '5' => &[&[(4., 0.), (0., 0.), (0., 3.), (3., 3.), (4., 4.), (4., 5.), (3., 6.), (0., 6.)]],
        '6' => &[&[(3., 0.), (1., 0.), (0., 1.), (0., 5.), (1., 6.), (3., 6.), (4., 5.), (4., 4.), (3., 3.), (0., 3.)]],
        '7' => &[&[(0., 0.), (4., 0.), (1., 6.)]],
        '8' => &[
            &[(1., 0.), (3., 0.), (4., 1.), (4., 2.), (3., 3.), (1., 3.), (0., 2.), (0., 1.), (1., 0.)],
            &[(1., 3.), (0., 4.), (0., 5.), (1., 6.), (3., 6.), (4., 5.), (4., 4.), (3., 3.)],
        ],
        '9' => &[&[(4., 3.), (1., 3.), (0., 2.), (0., 1.), (1., 0.), (3., 0.), (4., 1.), (4., 5.), (3., 6.), (1., 6.)]],
        'a' => &[&[(4., 2.), (4., 6.)], &[(4., 3.), (3., 2.), (1., 2.), (0., 3.), (0., 5.), (1., 6.), (3., 6.), (4., 5.)]],
        'b' => &[&[(0., 0.), (0., 6.)], &[(0., 3.), (1., 2.), (3., 2.), (4., 3.), (4., 5.), (3., 6.), (1., 6.), (0., 5.)]],
        'c' => &[&[(4., 3.), (3., 2.), (1., 2.), (0., 3.), (0., 5.), (1., 6.), (3., 6.), (4., 5.)]],
        'd' => &[&[(4., 0.), (4., 6.)], &[(4., 3.), (3., 2.), (1., 2.), (0., 3.), (0., 5.), (1., 6.), (3., 6.), (4., 5.)]],
        'e' => &[&[(0., 4.), (4., 4.), (4., 3.), (3., 2.), (1., 2.), (0., 3.), (0., 5.), (1., 6.), (4., 6.)]],
        'f' => &[&[(3., 0.), (2., 0.), (1., 1.), (1., 6.)], &[(0., 2.), (3., 2.)]],
        'g' => &[
            &[(4., 2.), (4., 7.), (3., 8.), (1., 8.), (0., 7.)],
            &[(4., 3.), (3., 2.), (1., 2.), (0., 3.), (0., 4.), (1., 5.), (3., 5.), (4., 4.)],
        ],
        'h' => &[&[(0., 0.), (0., 6.)], &[(0., 3.), (1., 2.), (3., 2.), (4., 3.), (4., 6.)]],
        'i' => &[&[(2., 2.), (2., 6.)], &[(2., 0.4), (2., 1.)]],
        'j' => &[&[(3., 2.), (3., 7.), (2., 8.), (1., 8.)], &[(3., 0.4), (3., 1.)]],
        'k' => &[&[(0., 0.), (0., 6.)], &[(4., 2.), (0., 5.)], &[(1.6, 3.8), (4., 6.)]],
        'l' => &[&[(2., 0.), (2., 5.), (3., 6.)]],
        'm' => &[&[(0., 2.), (0., 6.)], &[(0., 3.), (1., 2.), (2., 3.), (2., 6.)], &[(2., 3.), (3., 2.), (4., 3.), (4., 6.)]],
        'n' => &[&[(0., 2.), (0., 6.)], &[(0., 3.), (1., 2.), (3., 2.), (4., 3.), (4., 6.)]],
        'o' => &[&[(1., 2.), (3., 2.), (4., 3.), (4., 5.), (3., 6.), (1., 6.), (0., 5.), (0., 3.), (1., 2.)]],
        'p' => &[&[(0., 2.), (0., 8.)], &[(0., 3.), (1., 2.), (3., 2.), (4., 3.), (4., 5.), (3., 6.), (1., 6.), (0., 5.)]],
        'q' => &[&[(4., 2.), (4., 8.)], &[(4., 3.), (3., 2.), (1., 2.), (0., 3.), (0., 5.), (1., 6.), (3., 6.), (4., 5.)]],
        'r' => &[&[(0., 2.), (0., 6.)], &[(0., 4.), (2., 2.), (4., 2.)]],
        's' => &[&[(4., 2.), (1., 2.), (0., 3.), (1., 4.), (3., 4.), (4., 5.), (3., 6.), (0., 6.)]],
        't' => &[&[(1., 0.), (1., 5.), (2., 6.), (3., 6.)], &[(0., 2.), (3., 2.)]],
        'u' => &[&[(0., 2.), (0., 5.), (1., 6.), (3., 6.), (4., 5.)], &[(4., 2.), (4., 6.)]],
        'v' => &[&[(0., 2.), (2., 6.), (4., 2.)]],
        'w' => &[&[(0., 2.), (1., 6.), (2., 3.), (3., 6.), (4., 2.)]],
        'x' => &[&[(0., 2.), (4., 6.)], &[(4., 2.), (0., 6.)]],
        'y' => &[&[(0., 2.), (2., 6.)], &[(4., 2.), (1., 8.)]],
        'z' => &[&[(0., 2.), (4., 2.), (0., 6.), (4., 6.)]],
        '+' => &[&[(2., 1.), (2., 5.)], &[(0., 3.), (4., 3.)]],
        '-' => &[&[(0.5, 3.), (3.5, 3.)]],
        '(' => &[&[(3., 0.), (1.5, 1.5), (1.5, 4.5), (3., 6.)]],
        ')' => &[&[(1., 0.), (2.5, 1.5), (2.5, 4.5), (1., 6.)]],
        ',' => &[&[(2., 5.5), (1.5, 7.)]],
        '.' => &[&[(2., 5.6), (2., 6.)]],
        ':' => &[&[(2., 2.), (2., 2.4)], &[(2., 5.6), (2., 6.)]],
        _ => &[],
    }
}

pub fn has_glyph(c: char) -> bool {
    c == ' ' || !glyph(c).is_empty()
}

/// Width of a string in font units.
pub fn text_width(text: &str) -> f64 {
    let n = text.chars().count();
    if n == 0 {
        0.0
    } else {
        (n as f64 - 1.0) * ADVANCE + GLYPH_WIDTH
    }
}

/// Lays out `text` centred on `center` with cap height `size`, turned
/// clockwise (on screen) by `quarter_turns` about the centre.
pub fn layout(text: &str, center: Point, size: f64, quarter_turns: u8) -> Vec<Vec<Point>> {
    let scale = size / CAP_HEIGHT;
    let half_w = text_width(text) / 2.0;
    let mut out = Vec::new();
    for (i, ch) in text.chars().enumerate() {
        let x0 = i as f64 * ADVANCE - half_w;
        for stroke in glyph(ch) {
            let pts = stroke
                .iter()
                .map(|&(gx, gy)| {
                    let local = Point::new((x0 + gx) * scale, (gy - CAP_HEIGHT / 2.0) * scale);
                    let turned = turn_clockwise(local, quarter_turns);
                    center.add(turned)
                })
                .collect();
            out.push(pts);
        }
    }
    out
}

/// Clockwise quarter turns in a y-down frame.
pub fn turn_clockwise(p: Point, quarter_turns: u8) -> Point {
    (0..quarter_turns % 4).fold(p, |q, _| Point::new(-q.y, q.x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_set(c: char, turns: u8) -> Vec<(i64, i64)> {
        // Segments as rounded endpoint pairs, order-free.
        let mut segs = Vec::new();
        for stroke in layout(&c.to_string(), Point::new(0.0, 0.0), CAP_HEIGHT, turns) {
            for w in stroke.windows(2) {
                let a = ((w[0].x * 1000.0).round() as i64, (w[0].y * 1000.0).round() as i64);
                let b = ((w[1].x * 1000.0).round() as i64, (w[1].y * 1000.0).round() as i64);
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                segs.push(a);
                segs.push(b);
            }
        }
        segs.sort();
        segs
    }

    #[test]
    fn symmetry_classes_hold_for_glyphs() {
        for c in ['N', 'S', 'Z', 'H', 'I', 'X'] {
            assert_eq!(point_set(c, 0), point_set(c, 2), "{c} should survive a half turn");
            assert_ne!(point_set(c, 0), point_set(c, 1), "{c} must not survive a quarter turn");
        }
        for c in ['O', '+'] {
            assert_eq!(point_set(c, 0), point_set(c, 1), "{c} should survive a quarter turn");
        }
        for c in ['A', 'F', 'G', 'J', 'L', 'P', 'R', '2', '4', '7'] {
            assert_ne!(point_set(c, 0), point_set(c, 2), "{c} must not survive a half turn");
        }
    }

    #[test]
    fn lowercase_alphabet_is_complete() {
        for c in 'a'..='z' {
            assert!(has_glyph(c));
        }
        for c in 'A'..='Z' {
            assert!(has_glyph(c));
        }
        for c in '0'..='9' {
            assert!(has_glyph(c));
        }
    }
}

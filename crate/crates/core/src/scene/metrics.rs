//! Embedded text metrics. Advance widths are for a Helvetica-like face at
//! size 10, covering printable ASCII (32–126).

/// Advance width for characters outside the table, at size 10.
pub const DEFAULT_ADVANCE: f64 = 6.0;
pub const LINE_HEIGHT: f64 = 1.2;
pub const FONT_FAMILY: &str = "Helvetica, Arial, sans-serif";

#[rustfmt::skip]
const ADVANCES: [f64; 95] = [
    // ' ' .. '/'
    2.78, 2.78, 3.55, 5.56, 5.56, 8.89, 6.67, 1.91, 3.33, 3.33, 3.89, 5.84, 2.78, 3.33, 2.78, 2.78,
    // '0' .. '?'
    5.56, 5.56, 5.56, 5.56, 5.56, 5.56, 5.56, 5.56, 5.56, 5.56, 2.78, 2.78, 5.84, 5.84, 5.84, 5.56,
    // '@' .. 'O'
    10.15, 6.67, 6.67, 7.22, 7.22, 6.67, 6.11, 7.78, 7.22, 2.78, 5.00, 6.67, 5.56, 8.33, 7.22, 7.78,
    // 'P' .. '_'
    6.67, 7.78, 7.22, 6.67, 6.11, 7.22, 6.67, 9.44, 6.67, 6.67, 6.11, 2.78, 2.78, 2.78, 4.69, 5.56,
    // '`' .. 'o'
    3.33, 5.56, 5.56, 5.00, 5.56, 5.56, 2.78, 5.56, 5.56, 2.22, 2.22, 5.00, 2.22, 8.33, 5.56, 5.56,
    // 'p' .. '~'
    5.56, 5.56, 3.33, 5.00, 2.78, 5.56, 5.00, 7.22, 5.00, 5.00, 5.00, 3.34, 2.60, 3.34, 5.84,
];

pub fn advance(c: char) -> f64 {
    match c as u32 {
        32..=126 => ADVANCES[(c as u32 - 32) as usize],
        _ => DEFAULT_ADVANCE,
    }
}

/// Width and line height of a single-line string at `size` pixels.
pub fn measure_text(s: &str, size: f64) -> (f64, f64) {
    let w: f64 = s.chars().map(advance).sum();
    (w * size / 10.0, LINE_HEIGHT * size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_string_has_line_height() {
        assert_eq!(measure_text("", 10.0), (0.0, 12.0));
    }

    #[test]
    fn additive_and_linear() {
        assert_eq!(measure_text("aa", 10.0).0, 2.0 * measure_text("a", 10.0).0);
        assert_eq!(measure_text("a", 20.0).0, 2.0 * measure_text("a", 10.0).0);
        assert_eq!(measure_text("\u{e9}", 10.0).0, DEFAULT_ADVANCE);
    }

    #[test]
    fn table_alignment() {
        assert_eq!(advance(' '), 2.78);
        assert_eq!(advance('0'), 5.56);
        assert_eq!(advance('@'), 10.15);
        assert_eq!(advance('W'), 9.44);
        assert_eq!(advance('a'), 5.56);
        assert_eq!(advance('~'), 5.84);
    }

    proptest! {
        #[test]
        fn concatenation_additive(a in "\\PC{0,12}", b in "\\PC{0,12}") {
            let ab = format!("{a}{b}");
            let sum = measure_text(&a, 11.0).0 + measure_text(&b, 11.0).0;
            prop_assert!((measure_text(&ab, 11.0).0 - sum).abs() < 1e-9);
        }
    }
}

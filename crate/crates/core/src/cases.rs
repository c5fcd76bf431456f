//! The sixteen sign cases of `(a, bc, lambda, mu)` and which of them admit
//! the rectangle construction.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::model::Rect;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SignCase {
    pub label: String,
    pub sign_a: i8,
    pub sign_bc: i8,
    pub sign_lambda: i8,
    pub sign_mu: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    All,
    Even,
    Odd,
}

impl Parity {
    pub fn admits(self, n: u32) -> bool {
        match self {
            Parity::All => true,
            Parity::Even => n.is_multiple_of(2),
            Parity::Odd => n % 2 == 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrant {
    Q1,
    Q2,
    Q3,
    Q4,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    REps,
    REpsMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Adaptability {
    pub adaptable: bool,
    pub n_parity: Parity,
    pub sn_quadrant: Quadrant,
    pub needs_f_image: bool,
    pub region: Region,
}

const ROMAN: [&str; 4] = ["I", "II", "III", "IV"];

fn pm(s: i8) -> char {
    if s > 0 {
        '+'
    } else {
        '-'
    }
}

fn norm(s: i8) -> i8 {
    if s < 0 {
        -1
    } else {
        1
    }
}

/// Table row for the given signs (any negative value counts as `-`).
pub fn classify(sign_a: i8, sign_bc: i8, sign_lambda: i8, sign_mu: i8) -> SignCase {
    let (sa, sbc, sl, sm) = (norm(sign_a), norm(sign_bc), norm(sign_lambda), norm(sign_mu));
    let row = match (sa, sbc) {
        (1, 1) => 0,
        (1, -1) => 1,
        (-1, 1) => 2,
        _ => 3,
    };
    SignCase {
        label: format!("{}_{{{}{}}}", ROMAN[row], pm(sl), pm(sm)),
        sign_a: sa,
        sign_bc: sbc,
        sign_lambda: sl,
        sign_mu: sm,
    }
}

/// Inverse of [`classify`] on labels it produces.
pub fn parse_label(label: &str) -> Option<SignCase> {
    let (row, rest) = label.split_once("_{")?;
    let rest = rest.strip_suffix('}')?;
    let idx = ROMAN.iter().position(|r| *r == row)?;
    let mut chars = rest.chars();
    let sl = sign_char(chars.next()?)?;
    let sm = sign_char(chars.next()?)?;
    if chars.next().is_some() {
        return None;
    }
    let (sa, sbc) = [(1, 1), (1, -1), (-1, 1), (-1, -1)][idx];
    Some(classify(sa, sbc, sl, sm))
}

fn sign_char(c: char) -> Option<i8> {
    match c {
        '+' => Some(1),
        '-' => Some(-1),
        _ => None,
    }
}

pub fn all_cases() -> Vec<SignCase> {
    let mut out = Vec::with_capacity(16);
    for sa in [1, -1] {
        for sbc in [1, -1] {
            for sl in [1, -1] {
                for sm in [1, -1] {
                    out.push(classify(sa, sbc, sl, sm));
                }
            }
        }
    }
    out
}

/// Vertical tangencies need `b * lambda^n * c < 0`, which fixes the parity of
/// `n`; the sign of `a * lambda^n` then puts the rectangle left or right of
/// the tangency. A left placement is repaired by one more iterate only when
/// `mu < 0` flips the abscissa.
pub fn adaptability(case: &SignCase) -> Adaptability {
    let n_parity = match (case.sign_lambda, case.sign_bc) {
        (1, -1) => Some(Parity::All),
        (1, _) => None,
        (_, -1) => Some(Parity::Even),
        _ => Some(Parity::Odd),
    };
    let Some(n_parity) = n_parity else {
        return Adaptability {
            adaptable: false,
            n_parity: Parity::All,
            sn_quadrant: Quadrant::None,
            needs_f_image: false,
            region: Region::REps,
        };
    };
    let lambda_n_sign = if case.sign_lambda < 0 && n_parity == Parity::Odd {
        -1
    } else {
        1
    };
    let quadrant = if case.sign_a * lambda_n_sign > 0 {
        Quadrant::Q1
    } else {
        Quadrant::Q2
    };
    let needs_f_image = quadrant == Quadrant::Q2 && case.sign_mu < 0;
    let adaptable = quadrant == Quadrant::Q1 || needs_f_image;
    Adaptability {
        adaptable,
        n_parity,
        sn_quadrant: quadrant,
        needs_f_image,
        region: region_for(case),
    }
}

/// Which return strip a case uses, independent of adaptability.
pub fn region_for(case: &SignCase) -> Region {
    let quadrant_two = {
        let odd_only = case.sign_lambda < 0 && case.sign_bc > 0;
        let lambda_n_sign = if odd_only { -1 } else { 1 };
        case.sign_a * lambda_n_sign < 0
    };
    if case.sign_mu < 0 || quadrant_two {
        Region::REpsMinus
    } else {
        Region::REps
    }
}

pub fn adaptable_count() -> usize {
    all_cases().iter().filter(|c| adaptability(c).adaptable).count()
}

pub fn choose_region(case: &SignCase, epsilon: f64) -> Result<Rect> {
    let ad = adaptability(case);
    if !ad.adaptable {
        return Err(LabError::NotAdaptable(case.label.clone()));
    }
    let e = epsilon;
    Ok(match ad.region {
        Region::REps => Rect::new(1.0 + e, (1.0 + e).powi(3), 0.0, e.powi(3)),
        Region::REpsMinus => Rect::new((1.0 + e).powi(-3), 1.0 / (1.0 + e), 0.0, e.powi(3)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_examples() {
        assert_eq!(classify(1, -1, 1, 1).label, "II_{++}");
        assert_eq!(classify(-1, -1, 1, -1).label, "IV_{+-}");
        assert_eq!(classify(1, 1, 1, 1).label, "I_{++}");
    }

    #[test]
    fn adaptability_examples() {
        let a = adaptability(&classify(1, -1, 1, 1));
        assert!(a.adaptable && !a.needs_f_image);
        assert_eq!(
            (a.n_parity, a.sn_quadrant, a.region),
            (Parity::All, Quadrant::Q1, Region::REps)
        );

        let a = adaptability(&classify(-1, 1, -1, 1));
        assert!(a.adaptable);
        assert_eq!((a.n_parity, a.sn_quadrant), (Parity::Odd, Quadrant::Q1));

        assert!(!adaptability(&classify(1, 1, 1, 1)).adaptable);
    }

    #[test]
    fn region_choice() {
        let r = choose_region(&classify(1, -1, 1, 1), 0.02).unwrap();
        assert_eq!(r.x_lo, 1.02);
        let iv = classify(-1, -1, 1, -1);
        assert_eq!(adaptability(&iv).sn_quadrant, Quadrant::Q2);
        let r = choose_region(&iv, 0.02).unwrap();
        assert!(r.x_hi < 1.0);
        assert!(matches!(
            choose_region(&classify(1, 1, 1, 1), 0.02),
            Err(LabError::NotAdaptable(_))
        ));
    }

    #[test]
    fn nine_adaptable_cases() {
        assert_eq!(adaptable_count(), 9);
        let mut got: Vec<String> = all_cases()
            .into_iter()
            .filter(|c| adaptability(c).adaptable)
            .map(|c| c.label)
            .collect();
        got.sort();
        let mut want = vec![
            "I_{--}", "II_{++}", "II_{+-}", "II_{-+}", "II_{--}", "III_{-+}", "III_{--}", "IV_{--}",
            "IV_{+-}",
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn labels_round_trip() {
        for c in all_cases() {
            assert_eq!(parse_label(&c.label).unwrap(), c);
        }
        assert!(parse_label("V_{++}").is_none());
    }
}

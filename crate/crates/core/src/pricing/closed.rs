use crate::model::TargetZone;

/// `a s/S_* + b (1 - s/S_*) exp(-r_* (T - t))`: the price in foreign-bond units
/// of the payoff `a S_T/S_* + b (1 - S_T/S_*)` under the linear peg.
pub fn closed_form_claim(s: f64, t: f64, maturity: f64, a: f64, b: f64, r_star: f64, s_star: f64) -> f64 {
    let w = s / s_star;
    a * w + b * (1.0 - w) * (-r_star * (maturity - t)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondQuote {
    pub price: f64,
    /// `r_d + r_*`.
    pub r_hat: f64,
    /// Set when `r_* >= r_d / gamma`: the foreign rate can turn negative somewhere
    /// in the band and the price can exceed 1.
    pub may_exceed_one: bool,
}

/// Zero-coupon bond paying one unit of foreign currency at `maturity`:
/// `P = (s/S_*) e^{-r_d tau} + (1 - s/S_*) e^{-(r_d + r_*) tau}`.
pub fn closed_form_bond(s: f64, t: f64, maturity: f64, r_domestic: f64, r_star: f64, zone: &TargetZone) -> BondQuote {
    let tau = maturity - t;
    let price = (-r_domestic * tau).exp() * closed_form_claim(s, t, maturity, 1.0, 1.0, r_star, zone.s_star());
    let may_exceed_one = !(r_star * zone.gamma() < r_domestic);
    debug_assert!(
        may_exceed_one || tau <= 0.0 || r_star < 0.0 || price < 1.0,
        "bond above par although the foreign rate stays positive"
    );
    BondQuote {
        price,
        r_hat: r_domestic + r_star,
        may_exceed_one,
    }
}

/// Actual (domestic-discounted) price `e^{-r_d (T - t)} v`.
pub fn discount_to_actual(v: f64, t: f64, maturity: f64, r_domestic: f64) -> f64 {
    (-r_domestic * (maturity - t)).exp() * v
}

/// Range of the foreign short rate `r_d + r_* (1 - s/S_*)` over the band.
pub fn foreign_rate_bounds(r_domestic: f64, r_star: f64, zone: &TargetZone) -> (f64, f64) {
    let swing = (r_star * zone.gamma()).abs();
    (r_domestic - swing, r_domestic + swing)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claim_special_cases() {
        let z = TargetZone::hkd();
        // forward: a = S_*, b = 0
        assert!((closed_form_claim(7.83, 0.2, 1.0, 7.80, 0.0, 0.7, 7.80) - 7.83).abs() < 1e-14);
        // terminal payoff
        let at_t = closed_form_claim(7.83, 1.0, 1.0, 2.0, 3.0, 0.7, 7.80);
        assert!((at_t - (2.0 * 7.83 / 7.80 + 3.0 * (1.0 - 7.83 / 7.80))).abs() < 1e-14);
        let q = closed_form_bond(7.80, 0.0, 2.0, 0.02, 0.5, &z);
        assert!((q.price - (-0.04f64).exp()).abs() < 1e-15);
        assert_eq!(q.r_hat, 0.52);
    }

    #[test]
    fn bond_below_par_when_foreign_rate_positive() {
        let z = TargetZone::hkd();
        let r_star = 0.9 * 0.02 / z.gamma();
        for k in 0..=100 {
            let s = 7.75 + 0.001 * k as f64;
            for tau in [0.1, 1.0, 10.0] {
                let q = closed_form_bond(s, 0.0, tau, 0.02, r_star, &z);
                assert!(q.price < 1.0 && q.price > 0.0);
                assert!(!q.may_exceed_one);
            }
        }
    }

    #[test]
    fn hkd_rich_peg_is_flagged() {
        let z = TargetZone::hkd();
        assert!(0.02 / z.gamma() < 4.0);
        let q = closed_form_bond(7.85, 0.0, 1.0, 0.02, 4.0, &z);
        assert!(q.may_exceed_one);
        // at one year the domestic discount still wins; a short bond crosses par
        assert!((q.price - 0.986_37).abs() < 1e-5);
        let short = closed_form_bond(7.85, 0.0, 0.1, 0.02, 4.0, &z);
        assert!(short.price > 1.0);
        let (lo, hi) = foreign_rate_bounds(0.02, 4.0, &z);
        assert!(lo < 0.0 && hi > 0.0);
    }

    #[test]
    fn domestic_discount() {
        assert_eq!(discount_to_actual(1.3, 0.0, 1.0, 0.0), 1.3);
        assert_eq!(discount_to_actual(1.3, 1.0, 1.0, 0.05), 1.3);
        assert!((discount_to_actual(1.0, 0.0, 1.0, 0.02) - (-0.02f64).exp()).abs() < 1e-16);
    }
}

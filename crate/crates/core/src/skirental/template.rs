/// The common shape `min{f(λ)·u(x), g(λ)}` of robustness-consistency bounds:
/// `f` increasing (the price of trusting the prediction), `g` decreasing (the
/// worst-case fallback) and `u` the quality of the prediction.
pub struct TradeoffTemplate<'a> {
    pub consistency: Box<dyn Fn(f64) -> f64 + 'a>,
    pub robustness: Box<dyn Fn(f64) -> f64 + 'a>,
    pub quality: Box<dyn Fn(f64) -> f64 + 'a>,
}

impl<'a> TradeoffTemplate<'a> {
    pub fn evaluate(&self, x: f64, lambda: f64) -> f64 {
        ((self.consistency)(lambda) * (self.quality)(x)).min((self.robustness)(lambda))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheduling::rr_bound;

    #[test]
    fn reproduces_round_robin_bound() {
        let (eta, n) = (3.0, 4usize);
        let t = TradeoffTemplate {
            consistency: Box::new(|l| 1.0 / (1.0 - l)),
            robustness: Box::new(|l| 2.0 / l),
            quality: Box::new(|_| 1.0 + 2.0 * eta / n as f64),
        };
        for k in 1..100 {
            let l = k as f64 / 100.0;
            assert!((t.evaluate(0.0, l) - rr_bound(l, eta, n).unwrap()).abs() < 1e-12);
        }
    }
}

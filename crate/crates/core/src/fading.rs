//! Fisher-Snedecor F fading: one reflector branch and the N-branch sum model.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::specfun::{
    beta_reg, gauss_2f1_eval, ln_beta, ln_gamma_unchecked, meijer_g_scaled, MeijerGSpec,
};

/// Per-branch F parameters.
///
/// `m` is the fading severity, `m_s` the shadowing parameter and `g_bar`
/// the (linear) mean channel power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    m: f64,
    m_s: f64,
    g_bar: f64,
}

impl FadingParams {
    pub fn new(m: f64, m_s: f64, g_bar: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::domain(format!("m must be positive, got {m}")));
        }
        if !(m_s.is_finite() && m_s > 1.0) {
            return Err(Error::domain(format!("m_s must exceed 1, got {m_s}")));
        }
        if !(g_bar.is_finite() && g_bar > 0.0) {
            return Err(Error::domain(format!(
                "g_bar must be positive, got {g_bar}"
            )));
        }
        Ok(Self { m, m_s, g_bar })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn m_s(&self) -> f64 {
        self.m_s
    }

    pub fn g_bar(&self) -> f64 {
        self.g_bar
    }

    /// Λ = m / ((m_s − 1) ḡ).
    pub fn lambda(&self) -> f64 {
        self.m / ((self.m_s - 1.0) * self.g_bar)
    }

    /// Density of the channel power g.
    pub fn pdf(&self, g: f64) -> Result<f64> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::domain(format!("pdf requires g >= 0, got {g}")));
        }
        let lambda = self.lambda();
        if g == 0.0 {
            return Ok(origin_density(self.m, self.m_s, lambda));
        }
        // Υ g^{-1} G^{1,1}_{1,1}[Λg | 1−m_s; m]
        let ln_upsilon = -ln_gamma_unchecked(self.m) - ln_gamma_unchecked(self.m_s);
        let spec = MeijerGSpec::new(
            vec![1.0 - self.m_s],
            vec![],
            vec![self.m],
            vec![],
            lambda * g,
        )?;
        Ok(meijer_g_scaled(&spec, ln_upsilon - g.ln())?.value)
    }

    /// P(g ≤ v), through the regularized incomplete beta function.
    pub fn cdf(&self, v: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return Err(Error::domain(format!("cdf requires v >= 0, got {v}")));
        }
        if v.is_infinite() {
            return Ok(1.0);
        }
        let x = self.lambda() * v;
        beta_reg(self.m, self.m_s, x / (1.0 + x))
    }

    /// One draw: g = X / (Λ Y) with X ~ Gamma(m), Y ~ Gamma(m_s).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        BranchSampler::new(self).draw(rng)
    }
}

// Value of a g^{a-1} density at the origin with prefactor `a·scale`.
fn origin_density(a: f64, b: f64, scale: f64) -> f64 {
    if a > 1.0 {
        0.0
    } else if a < 1.0 {
        f64::INFINITY
    } else {
        // a = 1: Γ(1+b)/Γ(b) · scale
        b * scale
    }
}

struct BranchSampler {
    numerator: Gamma<f64>,
    denominator: Gamma<f64>,
    scale: f64,
}

impl BranchSampler {
    fn new(p: &FadingParams) -> Self {
        Self {
            numerator: Gamma::new(p.m, 1.0).expect("validated shape"),
            denominator: Gamma::new(p.m_s, 1.0).expect("validated shape"),
            scale: 1.0 / p.lambda(),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.numerator.sample(rng);
        let y = self.denominator.sample(rng);
        self.scale * x / y
    }
}

/// How aggregate channel power is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleMode {
    /// One draw from the single F-shaped sum density with (Nm, Nm_s, ξ).
    ModelDraw,
    /// The literal sum of N independent branch draws.
    PhysicalDraw,
}

impl SampleMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SampleMode::ModelDraw => "model",
            SampleMode::PhysicalDraw => "physical",
        }
    }
}

/// Distribution of g_D = Σ g_{d,n} over N i.i.d. branches, in the F-shaped
/// form with parameters (Nm, Nm_s) and scale ξ = m/(N m_s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumFadingModel {
    params: FadingParams,
    n_cells: u32,
    xi: f64,
    ln_lambda_norm: f64,
}

impl SumFadingModel {
    pub fn new(params: FadingParams, n_cells: u32) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::domain("the surface needs at least one cell"));
        }
        let n = n_cells as f64;
        let xi = params.m / (n * params.m_s);
        let ln_lambda_norm =
            xi.ln() - ln_gamma_unchecked(n * params.m) - ln_gamma_unchecked(n * params.m_s);
        Ok(Self {
            params,
            n_cells,
            xi,
            ln_lambda_norm,
        })
    }

    /// Build from explicit per-branch parameters; all branches must be
    /// identical.
    pub fn from_branches(branches: &[FadingParams]) -> Result<Self> {
        let first = branches
            .first()
            .ok_or_else(|| Error::domain("at least one branch is required"))?;
        if let Some((i, b)) = branches.iter().enumerate().find(|(_, b)| *b != first) {
            return Err(Error::domain(format!(
                "sum model needs i.i.d. branches; branch {i} has (m={}, m_s={}, g_bar={}) vs (m={}, m_s={}, g_bar={})",
                b.m, b.m_s, b.g_bar, first.m, first.m_s, first.g_bar
            )));
        }
        let n = u32::try_from(branches.len()).map_err(|_| Error::domain("too many branches"))?;
        Self::new(*first, n)
    }

    pub fn params(&self) -> &FadingParams {
        &self.params
    }

    pub fn n_cells(&self) -> u32 {
        self.n_cells
    }

    /// ξ = m/(N m_s).
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Nm.
    pub fn shape_fading(&self) -> f64 {
        self.n_cells as f64 * self.params.m
    }

    /// N m_s.
    pub fn shape_shadowing(&self) -> f64 {
        self.n_cells as f64 * self.params.m_s
    }

    /// Λ = ξ/(Γ(Nm)Γ(Nm_s)); underflows to 0 for large surfaces, see
    /// [`Self::ln_lambda_norm`].
    pub fn lambda_norm(&self) -> f64 {
        self.ln_lambda_norm.exp()
    }

    pub fn ln_lambda_norm(&self) -> f64 {
        self.ln_lambda_norm
    }

    /// ln f(g) for g > 0.
    pub fn ln_sum_pdf(&self, g: f64) -> f64 {
        let a = self.shape_fading();
        let b = self.shape_shadowing();
        let x = self.xi * g;
        let lb = ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b);
        a * x.ln() - g.ln() - lb - (a + b) * x.ln_1p()
    }

    /// Density of g_D in the algebraic form
    /// (gξ)^{Nm} / (g B(Nm, Nm_s)) · (1 + gξ)^{−N(m+m_s)}.
    pub fn sum_pdf(&self, g: f64) -> Result<f64> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::domain(format!("sum_pdf requires g >= 0, got {g}")));
        }
        if g == 0.0 {
            let a = self.shape_fading();
            let b = self.shape_shadowing();
            return Ok(origin_density(a, b, self.xi));
        }
        Ok(self.ln_sum_pdf(g).exp())
    }

    /// The same density written with the Gauss hypergeometric factor
    /// ₂F₁(N(m+m_s), Nm; Nm; −gξ); an independent route to [`Self::sum_pdf`].
    pub fn sum_pdf_hypergeometric(&self, g: f64) -> Result<f64> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::domain(format!(
                "hypergeometric sum_pdf requires g > 0, got {g}"
            )));
        }
        let a = self.shape_fading();
        let b = self.shape_shadowing();
        let f = gauss_2f1_eval(a + b, a, a, -g * self.xi)?;
        let ln = a * (g * self.xi).ln() - g.ln() - ln_beta(a, b)? + f.ln_abs;
        Ok(f.sign * ln.exp())
    }

    /// Small-g approximation g^{Nm−1}/B(Nm, Nm_s) · ξ^{Nm}.
    pub fn sum_pdf_origin(&self, g: f64) -> Result<f64> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::domain(format!(
                "sum_pdf_origin requires g >= 0, got {g}"
            )));
        }
        let a = self.shape_fading();
        let b = self.shape_shadowing();
        let ln_c = a * self.xi.ln() - ln_beta(a, b)?;
        if g == 0.0 {
            return Ok(if a > 1.0 {
                0.0
            } else if a < 1.0 {
                f64::INFINITY
            } else {
                ln_c.exp()
            });
        }
        Ok((ln_c + (a - 1.0) * g.ln()).exp())
    }

    /// P(g_D ≤ g) under the sum model.
    pub fn sum_cdf(&self, g: f64) -> Result<f64> {
        if !(g >= 0.0) {
            return Err(Error::domain(format!("sum_cdf requires g >= 0, got {g}")));
        }
        if g.is_infinite() {
            return Ok(1.0);
        }
        let x = self.xi * g;
        beta_reg(self.shape_fading(), self.shape_shadowing(), x / (1.0 + x))
    }

    /// One aggregate-power draw.
    pub fn sample_sum<R: Rng + ?Sized>(&self, mode: SampleMode, rng: &mut R) -> f64 {
        SumSampler::new(self, mode).draw(rng)
    }
}

/// Reusable sampler for g_D; holds the gamma generators so hot loops do not
/// rebuild them.
pub struct SumSampler {
    inner: SamplerKind,
}

enum SamplerKind {
    Model(BranchSampler),
    Physical { branch: BranchSampler, n: u32 },
}

impl SumSampler {
    pub fn new(model: &SumFadingModel, mode: SampleMode) -> Self {
        let inner = match mode {
            SampleMode::ModelDraw => SamplerKind::Model(BranchSampler {
                numerator: Gamma::new(model.shape_fading(), 1.0).expect("validated shape"),
                denominator: Gamma::new(model.shape_shadowing(), 1.0).expect("validated shape"),
                scale: 1.0 / model.xi,
            }),
            SampleMode::PhysicalDraw => SamplerKind::Physical {
                branch: BranchSampler::new(&model.params),
                n: model.n_cells,
            },
        };
        Self { inner }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.inner {
            SamplerKind::Model(s) => s.draw(rng),
            SamplerKind::Physical { branch, n } => (0..*n).map(|_| branch.draw(rng)).sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validation::{integrate_half_line, ks_statistic, ks_two_sample, Tolerance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn params_validation() {
        assert!(FadingParams::new(0.0, 2.0, 1.0).is_err());
        assert!(FadingParams::new(1.0, 1.0, 1.0).is_err());
        assert!(FadingParams::new(1.0, 0.5, 1.0).is_err());
        assert!(FadingParams::new(1.0, 2.0, 0.0).is_err());
        assert!(FadingParams::new(1.0, 2.0, f64::NAN).is_err());
        assert!(SumFadingModel::new(FadingParams::new(1.0, 2.0, 1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn pdf_examples() {
        let p = FadingParams::new(1.0, 2.0, 1.0).unwrap();
        assert!((p.pdf(0.0).unwrap() - 2.0).abs() < 1e-14);
        assert!(rel(p.pdf(1.0).unwrap(), 0.25) < 1e-13);
        // 2/(1+g)^3 everywhere
        for g in [0.01, 0.3, 7.0, 250.0] {
            assert!(rel(p.pdf(g).unwrap(), 2.0 / (1.0 + g).powi(3)) < 1e-12);
        }
        let q = FadingParams::new(2.0, 5.0, 1.0).unwrap();
        assert!(q.pdf(-0.1).is_err());
    }

    #[test]
    fn cdf_examples() {
        let p = FadingParams::new(1.0, 2.0, 1.0).unwrap();
        assert_eq!(p.cdf(0.0).unwrap(), 0.0);
        assert!((p.cdf(1.0).unwrap() - 0.75).abs() < 1e-14);
        assert!((p.cdf(1e6).unwrap() - 1.0).abs() < 1e-9);
        assert!(p.cdf(-1.0).is_err());
    }

    #[test]
    fn pdf_normalised_and_cdf_consistent_on_grid() {
        for &m in &[0.5, 1.0, 2.0, 4.0] {
            for &m_s in &[1.5, 2.0, 5.0, 20.0] {
                let p = FadingParams::new(m, m_s, 1.0).unwrap();
                let breaks = [1e-6, 1e-3, 0.1, 1.0, 10.0, 1e3];
                let total =
                    integrate_half_line(|g| p.pdf(g).unwrap(), &breaks, Tolerance::default())
                        .unwrap();
                assert!(
                    (total.value - 1.0).abs() < 1e-8,
                    "m={m} m_s={m_s}: {}",
                    total.value
                );
                for v in [0.1, 1.0, 10.0] {
                    let mut pts = vec![0.0];
                    pts.extend(breaks.iter().copied().filter(|b| *b < v));
                    pts.push(v);
                    let part = crate::validation::integrate(
                        |g| p.pdf(g).unwrap(),
                        &pts,
                        Tolerance::default(),
                    )
                    .unwrap();
                    assert!(
                        (part.value - p.cdf(v).unwrap()).abs() < 1e-8,
                        "m={m} m_s={m_s} v={v}"
                    );
                }
            }
        }
    }

    #[test]
    fn sample_mean_and_determinism() {
        let p = FadingParams::new(2.0, 5.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mean = (0..n).map(|_| p.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");

        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            assert_eq!(p.sample(&mut a).to_bits(), p.sample(&mut b).to_bits());
        }
    }

    #[test]
    fn sample_matches_cdf() {
        let p = FadingParams::new(2.0, 5.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let xs: Vec<f64> = (0..100_000).map(|_| p.sample(&mut rng)).collect();
        let d = ks_statistic(&xs, |v| p.cdf(v).unwrap()).unwrap();
        assert!(d < 0.006, "KS = {d}");
    }

    #[test]
    fn sum_pdf_forms_agree() {
        for (n, m, m_s) in [
            (1, 1.0, 2.0),
            (1, 1.0, 5.0),
            (4, 2.0, 5.0),
            (16, 1.0, 5.0),
            (32, 4.0, 2.0),
        ] {
            let model = SumFadingModel::new(FadingParams::new(m, m_s, 1.0).unwrap(), n).unwrap();
            for g in [1e-3, 0.1, 0.9, 1.0, 3.0, 30.0, 400.0] {
                let a = model.sum_pdf(g).unwrap();
                let b = model.sum_pdf_hypergeometric(g).unwrap();
                if a > 1e-300 {
                    assert!(rel(a, b) < 1e-10, "N={n} m={m} m_s={m_s} g={g}: {a} vs {b}");
                }
            }
        }
        let model = SumFadingModel::new(FadingParams::new(1.0, 2.0, 1.0).unwrap(), 1).unwrap();
        // ξ = 1/2: (g/2)/(g·B(1,2)) (1+g/2)^{-3} = (1/2)·2·... at g = 1
        let want = 0.5 / 0.5 * (1.5f64).powi(-3);
        assert!(rel(model.sum_pdf(1.0).unwrap(), want) < 1e-13);
    }

    #[test]
    fn sum_pdf_normalised() {
        for (n, m, m_s) in [(1, 1.0, 5.0), (8, 1.0, 5.0), (32, 4.0, 2.0), (3, 0.5, 1.5)] {
            let model = SumFadingModel::new(FadingParams::new(m, m_s, 1.0).unwrap(), n).unwrap();
            let mean = 1.0 / model.xi();
            let breaks = [
                mean * 1e-4,
                mean * 0.1,
                mean * 0.5,
                mean,
                mean * 2.0,
                mean * 10.0,
            ];
            let total =
                integrate_half_line(|g| model.sum_pdf(g).unwrap(), &breaks, Tolerance::default())
                    .unwrap();
            assert!((total.value - 1.0).abs() < 1e-8, "N={n}: {}", total.value);
        }
        let model = SumFadingModel::new(FadingParams::new(1.0, 5.0, 1.0).unwrap(), 4).unwrap();
        assert_eq!(model.sum_pdf(0.0).unwrap(), 0.0);
    }

    #[test]
    fn single_cell_sum_matches_branch_pdf() {
        // ξ = m/m_s equals Λ = m/((m_s-1)ḡ) when ḡ = m_s/(m_s-1)
        for (m, m_s) in [(1.0, 2.0), (2.0, 5.0), (0.5, 1.5), (4.0, 20.0)] {
            let branch = FadingParams::new(m, m_s, m_s / (m_s - 1.0)).unwrap();
            let model = SumFadingModel::new(branch, 1).unwrap();
            for g in [0.01, 0.5, 2.0, 17.0] {
                assert!(rel(model.sum_pdf(g).unwrap(), branch.pdf(g).unwrap()) < 1e-10);
                assert!((model.sum_cdf(g).unwrap() - branch.cdf(g).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn origin_approximation() {
        let model = SumFadingModel::new(FadingParams::new(1.0, 5.0, 1.0).unwrap(), 1).unwrap();
        for g in [0.0, 0.3, 12.0] {
            assert!((model.sum_pdf_origin(g).unwrap() - 1.0).abs() < 1e-13);
        }
        for (n, m, m_s) in [(1, 2.0, 5.0), (8, 1.0, 5.0), (2, 0.7, 3.0)] {
            let model = SumFadingModel::new(FadingParams::new(m, m_s, 1.0).unwrap(), n).unwrap();
            let g = 1e-6;
            let r = model.sum_pdf_origin(g).unwrap() / model.sum_pdf(g).unwrap();
            assert!((r - 1.0).abs() < 1e-3, "N={n}: {r}");
        }
    }

    #[test]
    fn unequal_branches_rejected() {
        let a = FadingParams::new(1.0, 5.0, 1.0).unwrap();
        let b = FadingParams::new(2.0, 5.0, 1.0).unwrap();
        assert!(SumFadingModel::from_branches(&[a, a, b]).is_err());
        assert!(SumFadingModel::from_branches(&[]).is_err());
        let m = SumFadingModel::from_branches(&[a, a, a]).unwrap();
        assert_eq!(m.n_cells(), 3);
    }

    #[test]
    fn sample_sum_modes() {
        // N = 1 with ḡ chosen so both modes describe the same law
        let branch = FadingParams::new(1.0, 5.0, 5.0 / 4.0).unwrap();
        let model = SumFadingModel::new(branch, 1).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(1);
        let mut r2 = ChaCha8Rng::seed_from_u64(2);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| model.sample_sum(SampleMode::ModelDraw, &mut r1))
            .collect();
        let ys: Vec<f64> = (0..100_000)
            .map(|_| model.sample_sum(SampleMode::PhysicalDraw, &mut r2))
            .collect();
        let d = ks_two_sample(&xs, &ys).unwrap();
        assert!(d < 0.009, "two-sample KS = {d}");
        let d = ks_statistic(&xs, |g| model.sum_cdf(g).unwrap()).unwrap();
        assert!(d < 0.006, "KS = {d}");

        let model = SumFadingModel::new(FadingParams::new(1.0, 5.0, 1.0).unwrap(), 8).unwrap();
        let sampler = SumSampler::new(&model, SampleMode::PhysicalDraw);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_000;
        let mean = (0..n).map(|_| sampler.draw(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 8.0).abs() < 0.1, "{mean}");
    }

    proptest::proptest! {
        #[test]
        fn cdfs_are_monotone_probabilities(
            m in 0.5f64..6.0, m_s in 1.2f64..20.0, n in 1u32..40, v in 1e-3f64..1e2, k in 1.01f64..4.0,
        ) {
            let p = FadingParams::new(m, m_s, 1.0).unwrap();
            let (a, b) = (p.cdf(v).unwrap(), p.cdf(k * v).unwrap());
            proptest::prop_assert!((0.0..=1.0).contains(&a) && a <= b && b <= 1.0);
            let s = SumFadingModel::new(p, n).unwrap();
            let (a, b) = (s.sum_cdf(v).unwrap(), s.sum_cdf(k * v).unwrap());
            proptest::prop_assert!((0.0..=1.0).contains(&a) && a <= b && b <= 1.0);
            proptest::prop_assert_eq!(s.xi(), m / (n as f64 * m_s));
        }
    }
}

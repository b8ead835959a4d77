//! Model data and the algebraic objects of the mean dynamics.
//!
//! A [`ModelSpec`] is a complete problem instance: dimensions, constants,
//! rewards, actor/critic features, and a generator family. The functions
//! in this module evaluate the softmax policy, the occupancy measure, the
//! critic data `b` and `A`, the actor field `G̃`, the boundary damping
//! `D`, and the exact and reduced vector fields built from them.
//!
//! All operations are pure; a model is immutable after construction and
//! can be shared freely across threads.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::markov::{self, GeneratorFamily};

/// Membership tolerance for the actor box on construction.
pub const TOL_BOX: f64 = 1e-9;
/// Membership tolerance for the probability simplex on construction.
pub const TOL_SIMPLEX: f64 = 1e-9;

/// A full problem instance.
///
/// Indices run `i ∈ 0..n_states` for states and `a ∈ 0..n_actions` for
/// actions. Actor features live in `ℝ^d`, critic features in `ℝ^m`.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    n_states: usize,
    n_actions: usize,
    actor_dim: usize,
    critic_dim: usize,
    r_theta: f64,
    tau: f64,
    lambda_c: f64,
    /// Rewards, `n_states × n_actions`.
    rewards: DMatrix<f64>,
    /// Actor feature vectors, flat index `i * n_actions + a`.
    actor_features: Vec<DVector<f64>>,
    /// Critic feature vectors, flat index `i * n_actions + a`.
    critic_features: Vec<DVector<f64>>,
    generators: GeneratorFamily,
}

impl ModelSpec {
    /// Build and validate a model instance.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_states: usize,
        n_actions: usize,
        actor_dim: usize,
        critic_dim: usize,
        r_theta: f64,
        tau: f64,
        lambda_c: f64,
        rewards: DMatrix<f64>,
        actor_features: Vec<DVector<f64>>,
        critic_features: Vec<DVector<f64>>,
        generators: GeneratorFamily,
    ) -> Result<Self> {
        if n_states == 0 || n_actions == 0 || actor_dim == 0 || critic_dim == 0 {
            return Err(Error::ModelValidation(
                "dimensions N, K, d, m must all be at least 1".into(),
            ));
        }
        for (name, v) in [("R_theta", r_theta), ("tau", tau), ("lambda_c", lambda_c)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::ModelValidation(format!(
                    "constant {name} must be a positive finite real, got {v}"
                )));
            }
        }
        if rewards.nrows() != n_states || rewards.ncols() != n_actions {
            return Err(Error::ModelValidation(format!(
                "rewards must be {n_states}x{n_actions}, got {}x{}",
                rewards.nrows(),
                rewards.ncols()
            )));
        }
        if actor_features.len() != n_states * n_actions {
            return Err(Error::ModelValidation(format!(
                "expected {} actor feature vectors, got {}",
                n_states * n_actions,
                actor_features.len()
            )));
        }
        if critic_features.len() != n_states * n_actions {
            return Err(Error::ModelValidation(format!(
                "expected {} critic feature vectors, got {}",
                n_states * n_actions,
                critic_features.len()
            )));
        }
        for (idx, psi) in actor_features.iter().enumerate() {
            if psi.len() != actor_dim {
                return Err(Error::ModelValidation(format!(
                    "actor feature {idx} has dimension {}, expected {actor_dim}",
                    psi.len()
                )));
            }
        }
        for (idx, phi) in critic_features.iter().enumerate() {
            if phi.len() != critic_dim {
                return Err(Error::ModelValidation(format!(
                    "critic feature {idx} has dimension {}, expected {critic_dim}",
                    phi.len()
                )));
            }
        }
        let model = Self {
            n_states,
            n_actions,
            actor_dim,
            critic_dim,
            r_theta,
            tau,
            lambda_c,
            rewards,
            actor_features,
            critic_features,
            generators,
        };
        model.generators.validate(&model)?;
        Ok(model)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn actor_dim(&self) -> usize {
        self.actor_dim
    }

    pub fn critic_dim(&self) -> usize {
        self.critic_dim
    }

    pub fn r_theta(&self) -> f64 {
        self.r_theta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn lambda_c(&self) -> f64 {
        self.lambda_c
    }

    pub fn rewards(&self) -> &DMatrix<f64> {
        &self.rewards
    }

    pub fn reward(&self, i: usize, a: usize) -> f64 {
        self.rewards[(i, a)]
    }

    /// Actor feature `ψ_{i,a}`.
    pub fn psi(&self, i: usize, a: usize) -> &DVector<f64> {
        &self.actor_features[i * self.n_actions + a]
    }

    /// Critic feature `φ_{i,a}`.
    pub fn phi(&self, i: usize, a: usize) -> &DVector<f64> {
        &self.critic_features[i * self.n_actions + a]
    }

    pub fn generators(&self) -> &GeneratorFamily {
        &self.generators
    }

    /// `M_r`, the largest absolute reward.
    pub fn m_r(&self) -> f64 {
        self.rewards.iter().fold(0.0, |acc, r| acc.max(r.abs()))
    }

    /// `M_φ`, the largest critic feature norm.
    pub fn m_phi(&self) -> f64 {
        self.critic_features
            .iter()
            .fold(0.0, |acc, phi| acc.max(phi.norm()))
    }

    /// `B_b = M_r M_φ`, the uniform bound on `|b(θ, μ)|`.
    pub fn b_b(&self) -> f64 {
        self.m_r() * self.m_phi()
    }

    /// Critic radius `R_w = max(1, 2 B_b / λ_c)` of the absorbing set.
    pub fn r_w(&self) -> f64 {
        (2.0 * self.b_b() / self.lambda_c).max(1.0)
    }

    /// True when `theta` lies in the box `Θ` within `tol`.
    pub fn theta_in_box(&self, theta: &DVector<f64>, tol: f64) -> bool {
        theta.len() == self.actor_dim && theta.iter().all(|t| t.abs() <= self.r_theta + tol)
    }

    /// Clip `theta` coordinatewise into the box `Θ`.
    pub fn clip_theta(&self, theta: &DVector<f64>) -> DVector<f64> {
        theta.map(|t| t.clamp(-self.r_theta, self.r_theta))
    }

    /// Draw a uniform sample from the absorbing set
    /// `K = Θ × B̄_{R_w} × Δ_S`.
    pub fn sample_absorbing_set<R: Rng>(&self, rng: &mut R) -> PhasePoint {
        let r = self.r_theta;
        let theta = DVector::from_fn(self.actor_dim, |_, _| rng.gen_range(-r..=r));
        let w = sample_ball(self.critic_dim, self.r_w(), rng);
        let mu = sample_simplex(self.n_states, rng);
        PhasePoint::new(theta, w, mu, self)
            .expect("uniform sample of the absorbing set is a valid phase point")
    }
}

/// Uniform sample of the closed ball of radius `radius` in `ℝ^dim`,
/// by rejection from the enclosing cube (dim is small here).
pub(crate) fn sample_ball<R: Rng>(dim: usize, radius: f64, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..=1.0));
        if v.norm_squared() <= 1.0 {
            return v * radius;
        }
    }
}

/// Uniform (Dirichlet(1,…,1)) sample of the probability simplex.
pub(crate) fn sample_simplex<R: Rng>(dim: usize, rng: &mut R) -> DVector<f64> {
    let mut mu = DVector::from_fn(dim, |_, _| {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        -u.ln()
    });
    let total = mu.sum();
    mu /= total;
    mu
}

/// A point `(θ, w, μ)` of the enlarged state space `X = Θ × ℝ^m × Δ_S`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub theta: DVector<f64>,
    pub w: DVector<f64>,
    pub mu: DVector<f64>,
}

impl PhasePoint {
    /// Validate membership in `X` at construction tolerance.
    pub fn new(
        theta: DVector<f64>,
        w: DVector<f64>,
        mu: DVector<f64>,
        model: &ModelSpec,
    ) -> Result<Self> {
        Self::with_tolerance(theta, w, mu, model, TOL_BOX, TOL_SIMPLEX)
    }

    /// Validate membership in `X` at caller-chosen tolerances. The
    /// integrator uses this with its guard tolerance.
    pub fn with_tolerance(
        theta: DVector<f64>,
        w: DVector<f64>,
        mu: DVector<f64>,
        model: &ModelSpec,
        tol_box: f64,
        tol_simplex: f64,
    ) -> Result<Self> {
        if theta.len() != model.actor_dim() {
            return Err(Error::InvalidInput(format!(
                "theta has dimension {}, model expects {}",
                theta.len(),
                model.actor_dim()
            )));
        }
        if w.len() != model.critic_dim() {
            return Err(Error::InvalidInput(format!(
                "w has dimension {}, model expects {}",
                w.len(),
                model.critic_dim()
            )));
        }
        if mu.len() != model.n_states() {
            return Err(Error::InvalidInput(format!(
                "mu has dimension {}, model expects {}",
                mu.len(),
                model.n_states()
            )));
        }
        if !model.theta_in_box(&theta, tol_box) {
            return Err(Error::InvalidInput(format!(
                "theta {:?} leaves the box [-{r}, {r}] beyond tolerance {tol_box:e}",
                theta.as_slice(),
                r = model.r_theta()
            )));
        }
        check_simplex(&mu, tol_simplex)?;
        if theta.iter().chain(w.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite phase point entry".into()));
        }
        Ok(Self { theta, w, mu })
    }

    /// The product metric
    /// `d_X = |θ−θ'| + |w−w'| + |μ−μ'|₁` (Euclidean on `θ` and `w`).
    pub fn dist(&self, other: &PhasePoint) -> f64 {
        (&self.theta - &other.theta).norm()
            + (&self.w - &other.w).norm()
            + (&self.mu - &other.mu).abs().sum()
    }

    /// True when the point lies in the absorbing set `K` within `tol`
    /// (box and simplex membership hold by construction; this adds the
    /// critic ball).
    pub fn in_absorbing_set(&self, model: &ModelSpec, tol: f64) -> bool {
        self.w.norm() <= model.r_w() + tol
    }
}

fn check_simplex(mu: &DVector<f64>, tol: f64) -> Result<()> {
    if mu.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite simplex entry".into()));
    }
    if let Some(bad) = mu.iter().find(|&&v| v < -tol) {
        return Err(Error::InvalidInput(format!(
            "mu entry {bad} is negative beyond tolerance {tol:e}"
        )));
    }
    let total = mu.sum();
    if (total - 1.0).abs() > tol {
        return Err(Error::InvalidInput(format!(
            "mu sums to {total}, not 1 within tolerance {tol:e}"
        )));
    }
    Ok(())
}

/// Softmax policy, one probability row per state.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyMatrix {
    /// `pi[(i, a)] = π_θ(a | i)`, `n_states × n_actions`.
    pub pi: DMatrix<f64>,
}

/// A tangent vector `(θ̇, ẇ, μ̇)` of the enlarged state space.
#[derive(Debug, Clone)]
pub struct Tangent {
    pub dtheta: DVector<f64>,
    pub dw: DVector<f64>,
    pub dmu: DVector<f64>,
}

fn check_theta(theta: &DVector<f64>, model: &ModelSpec) -> Result<()> {
    if theta.len() != model.actor_dim() {
        return Err(Error::InvalidInput(format!(
            "theta has dimension {}, model expects {}",
            theta.len(),
            model.actor_dim()
        )));
    }
    if !model.theta_in_box(theta, TOL_BOX) {
        return Err(Error::InvalidInput(format!(
            "theta {:?} outside the box of radius {}",
            theta.as_slice(),
            model.r_theta()
        )));
    }
    Ok(())
}

/// Per-state shifted logits and their log-normalizer: for state `i`
/// returns `(z_a = ψ_{i,a}·θ/τ − max_b z_b, log Σ_a exp z_a)`.
fn shifted_logits(theta: &DVector<f64>, model: &ModelSpec, i: usize) -> (Vec<f64>, f64) {
    let k = model.n_actions();
    let mut z: Vec<f64> = (0..k).map(|a| model.psi(i, a).dot(theta) / model.tau()).collect();
    let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for v in z.iter_mut() {
        *v -= zmax;
    }
    let log_norm = z.iter().map(|v| v.exp()).sum::<f64>().ln();
    (z, log_norm)
}

/// Softmax policy `π_θ(a|i) = exp(ψ_{i,a}·θ/τ) / Σ_b exp(ψ_{i,b}·θ/τ)`,
/// computed with per-state max subtraction.
pub fn softmax_policy(theta: &DVector<f64>, model: &ModelSpec) -> Result<PolicyMatrix> {
    check_theta(theta, model)?;
    Ok(softmax_policy_raw(theta, model))
}

pub(crate) fn softmax_policy_raw(theta: &DVector<f64>, model: &ModelSpec) -> PolicyMatrix {
    let (n, k) = (model.n_states(), model.n_actions());
    let mut pi = DMatrix::zeros(n, k);
    for i in 0..n {
        let (z, log_norm) = shifted_logits(theta, model, i);
        for a in 0..k {
            pi[(i, a)] = (z[a] - log_norm).exp();
        }
    }
    PolicyMatrix { pi }
}

/// Score function of the softmax policy,
/// `∇_θ log π_θ(a|i) = (ψ_{i,a} − Σ_b π_θ(b|i) ψ_{i,b}) / τ`.
pub fn grad_log_policy(
    theta: &DVector<f64>,
    model: &ModelSpec,
    i: usize,
    a: usize,
) -> Result<DVector<f64>> {
    check_theta(theta, model)?;
    if i >= model.n_states() || a >= model.n_actions() {
        return Err(Error::InvalidInput(format!(
            "state/action index ({i}, {a}) out of range ({}, {})",
            model.n_states(),
            model.n_actions()
        )));
    }
    let policy = softmax_policy_raw(theta, model);
    Ok(grad_log_policy_raw(&policy, model, i, a))
}

fn grad_log_policy_raw(policy: &PolicyMatrix, model: &ModelSpec, i: usize, a: usize) -> DVector<f64> {
    let mut mean = DVector::zeros(model.actor_dim());
    for b in 0..model.n_actions() {
        mean += model.psi(i, b) * policy.pi[(i, b)];
    }
    (model.psi(i, a) - mean) / model.tau()
}

/// Occupancy measure `ν(i, a) = μ_i π_θ(a|i)`.
pub fn occupancy(
    theta: &DVector<f64>,
    mu: &DVector<f64>,
    model: &ModelSpec,
) -> Result<DMatrix<f64>> {
    check_theta(theta, model)?;
    if mu.len() != model.n_states() {
        return Err(Error::InvalidInput(format!(
            "mu has dimension {}, model expects {}",
            mu.len(),
            model.n_states()
        )));
    }
    check_simplex(mu, TOL_SIMPLEX)?;
    let policy = softmax_policy_raw(theta, model);
    let mut nu = policy.pi;
    for i in 0..model.n_states() {
        for a in 0..model.n_actions() {
            nu[(i, a)] *= mu[i];
        }
    }
    Ok(nu)
}

/// Averaged reward-weighted feature `b(θ, μ) = Σ ν(i,a) r_{i,a} φ_{i,a}`.
pub fn critic_b(theta: &DVector<f64>, mu: &DVector<f64>, model: &ModelSpec) -> Result<DVector<f64>> {
    let nu = occupancy(theta, mu, model)?;
    Ok(critic_b_raw(&nu, model))
}

fn critic_b_raw(nu: &DMatrix<f64>, model: &ModelSpec) -> DVector<f64> {
    let mut b = DVector::zeros(model.critic_dim());
    for i in 0..model.n_states() {
        for a in 0..model.n_actions() {
            b += model.phi(i, a) * (nu[(i, a)] * model.reward(i, a));
        }
    }
    b
}

/// Regularized feature covariance
/// `A(θ, μ) = λ_c I + Σ ν(i,a) φ_{i,a} φ_{i,a}ᵀ`.
pub fn critic_a(theta: &DVector<f64>, mu: &DVector<f64>, model: &ModelSpec) -> Result<DMatrix<f64>> {
    let nu = occupancy(theta, mu, model)?;
    Ok(critic_a_raw(&nu, model))
}

fn critic_a_raw(nu: &DMatrix<f64>, model: &ModelSpec) -> DMatrix<f64> {
    let m = model.critic_dim();
    let mut a_mat = DMatrix::identity(m, m) * model.lambda_c();
    for i in 0..model.n_states() {
        for a in 0..model.n_actions() {
            let phi = model.phi(i, a);
            a_mat.ger(nu[(i, a)], phi, phi, 1.0);
        }
    }
    a_mat
}

/// Softmax policy-gradient direction
/// `G̃ = Σ ν(i,a) (r_{i,a} + φ_{i,a}·w − τ log π_θ(a|i)) ∇_θ log π_θ(a|i)`.
pub fn actor_gtilde(
    theta: &DVector<f64>,
    w: &DVector<f64>,
    mu: &DVector<f64>,
    model: &ModelSpec,
) -> Result<DVector<f64>> {
    check_theta(theta, model)?;
    if w.len() != model.critic_dim() {
        return Err(Error::InvalidInput(format!(
            "w has dimension {}, model expects {}",
            w.len(),
            model.critic_dim()
        )));
    }
    check_simplex(mu, TOL_SIMPLEX)?;
    Ok(actor_gtilde_raw(theta, w, mu, model))
}

fn actor_gtilde_raw(
    theta: &DVector<f64>,
    w: &DVector<f64>,
    mu: &DVector<f64>,
    model: &ModelSpec,
) -> DVector<f64> {
    let policy = softmax_policy_raw(theta, model);
    let mut g = DVector::zeros(model.actor_dim());
    for i in 0..model.n_states() {
        let (z, log_norm) = shifted_logits(theta, model, i);
        for a in 0..model.n_actions() {
            let nu_ia = mu[i] * policy.pi[(i, a)];
            if nu_ia == 0.0 {
                continue;
            }
            let log_pi = z[a] - log_norm;
            let weight = model.reward(i, a) + model.phi(i, a).dot(w) - model.tau() * log_pi;
            g += grad_log_policy_raw(&policy, model, i, a) * (nu_ia * weight);
        }
    }
    g
}

/// Boundary damping `D(θ) = diag(R_θ² − θ_j²)`; vanishes exactly on the
/// faces of the box and confines the actor to `Θ`.
pub fn damping_d(theta: &DVector<f64>, model: &ModelSpec) -> Result<DMatrix<f64>> {
    check_theta(theta, model)?;
    let r2 = model.r_theta() * model.r_theta();
    Ok(DMatrix::from_diagonal(&theta.map(|t| r2 - t * t)))
}

/// Exact three-variable vector field
/// `(D(θ)G̃, b − A w, δ⁻¹ Q_θ* μ)` of the enlarged system.
pub fn exact_vector_field(x: &PhasePoint, delta: f64, model: &ModelSpec) -> Result<Tangent> {
    if !(delta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "delta must be positive, got {delta}"
        )));
    }
    check_theta(&x.theta, model)?;
    let (dtheta, dw, dmu) = rhs_exact_raw(model, &x.theta, &x.w, &x.mu, delta)?;
    Ok(Tangent { dtheta, dw, dmu })
}

/// Ambient right-hand side of the exact system. The generator argument is
/// clipped into the box, matching the extension used to define the
/// semiflow; the remaining algebra is globally smooth as written.
pub(crate) fn rhs_exact_raw(
    model: &ModelSpec,
    theta: &DVector<f64>,
    w: &DVector<f64>,
    mu: &DVector<f64>,
    delta: f64,
) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>)> {
    let policy = softmax_policy_raw(theta, model);
    let mut nu = policy.pi.clone();
    for i in 0..model.n_states() {
        for a in 0..model.n_actions() {
            nu[(i, a)] *= mu[i];
        }
    }

    let gtilde = actor_gtilde_raw(theta, w, mu, model);
    let r2 = model.r_theta() * model.r_theta();
    let dtheta = DVector::from_fn(model.actor_dim(), |j, _| (r2 - theta[j] * theta[j]) * gtilde[j]);

    let b = critic_b_raw(&nu, model);
    let a_mat = critic_a_raw(&nu, model);
    let dw = b - a_mat * w;

    let theta_clipped = model.clip_theta(theta);
    let q = markov::eval_generator(model, &theta_clipped)?;
    let dmu = q.tr_mul(mu) / delta;

    Ok((dtheta, dw, dmu))
}

/// Reduced invariant-law vector field on `Y = Θ × ℝ^m`: the exact actor
/// and critic equations with `μ` replaced by the stationary law `μ_θ`.
pub fn reduced_vector_field(
    theta: &DVector<f64>,
    w: &DVector<f64>,
    model: &ModelSpec,
) -> Result<(DVector<f64>, DVector<f64>)> {
    check_theta(theta, model)?;
    rhs_reduced_raw(model, theta, w)
}

pub(crate) fn rhs_reduced_raw(
    model: &ModelSpec,
    theta: &DVector<f64>,
    w: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let theta_clipped = model.clip_theta(theta);
    let mu_theta = markov::stationary_law(model, &theta_clipped)?;

    let gtilde = actor_gtilde_raw(theta, w, &mu_theta, model);
    let r2 = model.r_theta() * model.r_theta();
    let dtheta = DVector::from_fn(model.actor_dim(), |j, _| (r2 - theta[j] * theta[j]) * gtilde[j]);

    let policy = softmax_policy_raw(theta, model);
    let mut nu = policy.pi;
    for i in 0..model.n_states() {
        for a in 0..model.n_actions() {
            nu[(i, a)] *= mu_theta[i];
        }
    }
    let b = critic_b_raw(&nu, model);
    let a_mat = critic_a_raw(&nu, model);
    let dw = b - a_mat * w;

    Ok((dtheta, dw))
}

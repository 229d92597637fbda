//! Newmark time integration of M Ü + N U̇ + A U = f.

mod observers;
mod solver;
mod stability;

pub use observers::{EnergyRecord, EnergyRecorder, Observer, VtkSnapshots};
pub use solver::{connected_components, LinearSolver, SolveStats, DENSE_COMPONENT_LIMIT, RELATIVE_TOLERANCE};
pub use stability::{stability_limit, StabilityEstimate};

use crate::assembly::{LoadAssembler, SystemMatrices};
use crate::sparse::CsrMatrix;
use crate::waves::IncidentField;

#[derive(Debug, thiserror::Error)]
pub enum TimeError {
    #[error("invalid Newmark parameters: {0}")]
    InvalidParams(String),
    #[error("singular block in the system matrix (first DOF {first_dof})")]
    SingularBlock { first_dof: usize },
    #[error("linear solver did not converge: residual {residual:e} after {iterations} iterations")]
    SolverFailed { iterations: usize, residual: f64 },
    #[error("non-finite values at step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("observer failed: {0}")]
    Observer(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewmarkParams {
    pub gamma: f64,
    pub delta: f64,
    /// Time step l.
    pub step: f64,
    pub final_time: f64,
}

impl NewmarkParams {
    /// The explicit choice γ = 1/2, δ = 0.
    pub fn explicit(step: f64, final_time: f64) -> Self {
        NewmarkParams { gamma: 0.5, delta: 0.0, step, final_time }
    }

    pub fn validate(&self) -> Result<(), TimeError> {
        let bad = |m: &str| Err(TimeError::InvalidParams(m.into()));
        if !(self.gamma >= 0.5) || !(self.delta >= 0.0) {
            return bad("need gamma >= 1/2 and delta >= 0");
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return bad("time step must be positive");
        }
        if !(self.final_time >= self.step * (1.0 - 1e-12)) || !self.final_time.is_finite() {
            return bad("final time must be at least one step");
        }
        Ok(())
    }

    /// Number of steps to reach the final time; a final time within 1e-9
    /// relative of a whole number of steps lands on it exactly.
    pub fn num_steps(&self) -> usize {
        let r = self.final_time / self.step;
        if (r - r.round()).abs() <= 1e-9 * r {
            r.round() as usize
        } else {
            r.ceil() as usize
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub t: f64,
}

impl State {
    pub fn zeros(n: usize) -> Self {
        State { u: vec![0.0; n], v: vec![0.0; n], w: vec![0.0; n], t: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).chain(&self.w).all(|x| x.is_finite())
    }
}

fn residual_rhs(m_n: &CsrMatrix, a: &CsrMatrix, f: &[f64], v: &[f64], u: &[f64]) -> Vec<f64> {
    let nv = m_n.matvec(v);
    let au = a.matvec(u);
    f.iter().zip(nv).zip(au).map(|((f, n), a)| f - n - a).collect()
}

/// W(0) from M W = f(0) - N V0 - A U0 with block solves of M.
pub fn init_state(
    m: &CsrMatrix,
    n: &CsrMatrix,
    a: &CsrMatrix,
    f0: &[f64],
    u0: Vec<f64>,
    v0: Vec<f64>,
) -> Result<State, TimeError> {
    let dim = m.nrows;
    if [n.nrows, a.nrows, f0.len(), u0.len(), v0.len()].iter().any(|&d| d != dim) {
        return Err(TimeError::Dimension(format!("expected {dim} everywhere")));
    }
    let rhs = residual_rhs(n, a, f0, &v0, &u0);
    let solver = LinearSolver::new(m.clone(), m)?;
    let mut w = vec![0.0; dim];
    solver.solve(&rhs, &mut w)?;
    Ok(State { u: u0, v: v0, w, t: 0.0 })
}

/// Cached effective matrix factorization for repeated steps.
pub struct Newmark<'a> {
    pub m: &'a CsrMatrix,
    pub n: &'a CsrMatrix,
    pub a: &'a CsrMatrix,
    pub params: NewmarkParams,
    solver: LinearSolver,
    pred_u: Vec<f64>,
    pred_v: Vec<f64>,
}

impl<'a> Newmark<'a> {
    pub fn new(
        m: &'a CsrMatrix,
        n: &'a CsrMatrix,
        a: &'a CsrMatrix,
        params: NewmarkParams,
    ) -> Result<Self, TimeError> {
        params.validate()?;
        let l = params.step;
        let mut eff = m.linear_combination(1.0, n, params.gamma * l);
        if params.delta != 0.0 {
            eff = eff.linear_combination(1.0, a, params.delta * l * l);
        }
        let solver = LinearSolver::new(eff, m)?;
        let dim = m.nrows;
        Ok(Newmark { m, n, a, params, solver, pred_u: vec![0.0; dim], pred_v: vec![0.0; dim] })
    }

    pub fn solver(&self) -> &LinearSolver {
        &self.solver
    }

    /// Advance `state` by one step with the load `f` at the new time level.
    pub fn step(&mut self, state: &mut State, f: &[f64]) -> Result<SolveStats, TimeError> {
        let NewmarkParams { gamma, delta, step: l, .. } = self.params;
        let c_w = 0.5 * (1.0 - 2.0 * delta) * l * l;
        for i in 0..state.u.len() {
            self.pred_u[i] = state.u[i] + l * state.v[i] + c_w * state.w[i];
            self.pred_v[i] = state.v[i] + (1.0 - gamma) * l * state.w[i];
        }
        let rhs = residual_rhs(self.n, self.a, f, &self.pred_v, &self.pred_u);
        // Previous acceleration is a good starting guess for the iterative path.
        let stats = self.solver.solve(&rhs, &mut state.w)?;
        for i in 0..state.u.len() {
            state.v[i] = self.pred_v[i] + gamma * l * state.w[i];
            state.u[i] = self.pred_u[i] + delta * l * l * state.w[i];
        }
        state.t += l;
        Ok(stats)
    }
}

/// One step without caching the factorization.
pub fn newmark_step(
    state: &State,
    m: &CsrMatrix,
    n: &CsrMatrix,
    a: &CsrMatrix,
    f: &[f64],
    params: NewmarkParams,
) -> Result<State, TimeError> {
    let mut next = state.clone();
    Newmark::new(m, n, a, params)?.step(&mut next, f)?;
    Ok(next)
}

/// Integrate from t = 0 to the final time. Observers see the initial state
/// (step 0) and every later step.
pub fn run(
    matrices: &SystemMatrices,
    load: &LoadAssembler,
    wave: &dyn IncidentField,
    params: NewmarkParams,
    u0: Vec<f64>,
    v0: Vec<f64>,
    observers: &mut [&mut dyn Observer],
) -> Result<State, TimeError> {
    let SystemMatrices { mass: m, damping: n, stiffness: a } = matrices;
    let mut f = load.assemble(wave, 0.0);
    let mut state = init_state(m, n, a, &f, u0, v0)?;
    for o in observers.iter_mut() {
        o.observe(0, &state, &SolveStats::default())?;
    }
    let mut stepper = Newmark::new(m, n, a, params)?;
    let steps = params.num_steps();
    for k in 1..=steps {
        let t = k as f64 * params.step;
        load.assemble_into(wave, t, &mut f);
        let stats = stepper.step(&mut state, &f)?;
        state.t = t;
        if !state.is_finite() {
            return Err(TimeError::NonFinite { step: k, time: t });
        }
        for o in observers.iter_mut() {
            o.observe(k, &state, &stats)?;
        }
    }
    Ok(state)
}

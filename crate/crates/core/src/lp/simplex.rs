//! Dense two-phase tableau simplex.
//!
//! Variables with finite bounds are shifted to be nonnegative, upper bounds
//! become extra rows, and free variables are kept as single columns that
//! may enter the basis in either direction but never leave it. Phase one
//! minimizes the sum of artificial variables; artificial columns are never
//! stored since they are not allowed to re-enter once they leave.
//!
//! Pivoting uses Dantzig's rule with a Harris-style two-pass ratio test,
//! switching to Bland's rule after `50 * (rows + cols)` iterations. The
//! final basis is re-solved against the original data, which removes the
//! drift accumulated over many tableau updates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Feasibility tolerance applied to the returned solution.
pub const PRIMAL_TOL: f64 = 1e-7;
/// Entries smaller than this are never used as pivots.
pub const PIVOT_TOL: f64 = 1e-9;
/// A reduced cost must be below `-OPT_TOL` for its column to enter.
pub const OPT_TOL: f64 = 1e-9;
/// Harris ratio-test relaxation.
const HARRIS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

/// `min cᵀy` subject to `A_ub y <= b_ub`, `A_eq y = b_eq` and
/// `lower <= y <= upper`. Bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub c: DVector<f64>,
    pub a_ub: DMatrix<f64>,
    pub b_ub: DVector<f64>,
    pub a_eq: DMatrix<f64>,
    pub b_eq: DVector<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// Unconstrained problem over free variables.
    pub fn new(c: DVector<f64>) -> Self {
        let n = c.len();
        Self {
            c,
            a_ub: DMatrix::zeros(0, n),
            b_ub: DVector::zeros(0),
            a_eq: DMatrix::zeros(0, n),
            b_eq: DVector::zeros(0),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn with_ub(mut self, a: DMatrix<f64>, b: DVector<f64>) -> Self {
        self.a_ub = a;
        self.b_ub = b;
        self
    }

    pub fn with_eq(mut self, a: DMatrix<f64>, b: DVector<f64>) -> Self {
        self.a_eq = a;
        self.b_eq = b;
        self
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn nonnegative(self) -> Self {
        let n = self.c.len();
        self.with_bounds(vec![0.0; n], vec![f64::INFINITY; n])
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    fn validate(&self) -> Result<(), String> {
        let n = self.c.len();
        if self.a_ub.ncols() != n || self.a_eq.ncols() != n {
            return Err("constraint matrix width differs from cost length".into());
        }
        if self.a_ub.nrows() != self.b_ub.len() || self.a_eq.nrows() != self.b_eq.len() {
            return Err("constraint rows differ from right-hand side length".into());
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err("bounds length differs from cost length".into());
        }
        let finite = self.c.iter().all(|v| v.is_finite())
            && self.a_ub.iter().all(|v| v.is_finite())
            && self.b_ub.iter().all(|v| v.is_finite())
            && self.a_eq.iter().all(|v| v.is_finite())
            && self.b_eq.iter().all(|v| v.is_finite());
        if !finite {
            return Err("non-finite problem data".into());
        }
        if self
            .lower
            .iter()
            .chain(&self.upper)
            .any(|v| v.is_nan())
            || self.lower.contains(&f64::INFINITY)
            || self.upper.contains(&f64::NEG_INFINITY)
        {
            return Err("invalid bounds".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub y: DVector<f64>,
    pub objective: f64,
    pub status: LpStatus,
    pub iterations: usize,
    /// Multipliers `λ >= 0` of the inequality rows, so that at optimality
    /// `c + A_ubᵀ λ + A_eqᵀ μ` is the (sign-feasible) bound multiplier.
    pub duals_ub: DVector<f64>,
    /// Multipliers `μ` of the equality rows.
    pub duals_eq: DVector<f64>,
    /// Final basis as standard-form columns: variables first, then one slack
    /// per inequality row, then one per finite upper bound. Empty unless
    /// optimal. Can be passed to [`lp_solve_from`].
    pub basis: Vec<usize>,
}

impl LpResult {
    fn failed(status: LpStatus, p: &LpProblem, iterations: usize) -> Self {
        Self {
            y: DVector::zeros(p.num_vars()),
            objective: f64::NAN,
            status,
            iterations,
            duals_ub: DVector::zeros(p.b_ub.len()),
            duals_eq: DVector::zeros(p.b_eq.len()),
            basis: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// How an original variable maps onto its nonnegative (or free) column:
/// `y = offset + dir * x`.
#[derive(Debug, Clone, Copy)]
struct VarMap {
    offset: f64,
    dir: f64,
    free: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Basic {
    Col(usize),
    Artificial(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Dantzig,
    Bland,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major, `cols + 1` entries per row, last one is the right-hand side.
    t: Vec<f64>,
    /// Reduced costs, last entry is minus the objective.
    cost: Vec<f64>,
    basis: Vec<Basic>,
    is_basic: Vec<bool>,
    free: Vec<bool>,
    /// ±1 per column; free columns are negated in place to enter downward.
    col_sign: Vec<f64>,
    /// Original standard-form row of each tableau row.
    origin: Vec<usize>,
    iterations: usize,
}

impl Tableau {
    fn stride(&self) -> usize {
        self.cols + 1
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.stride() + self.cols]
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.stride() + j]
    }

    fn basic_is_free(&self, i: usize) -> bool {
        matches!(self.basis[i], Basic::Col(j) if self.free[j])
    }

    fn basic_order(&self, i: usize) -> usize {
        match self.basis[i] {
            Basic::Col(j) => j,
            Basic::Artificial(r) => self.cols + r,
        }
    }

    fn flip_column(&mut self, j: usize) {
        let s = self.stride();
        for i in 0..self.rows {
            self.t[i * s + j] = -self.t[i * s + j];
        }
        self.cost[j] = -self.cost[j];
        self.col_sign[j] = -self.col_sign[j];
    }

    fn choose_entering(&mut self, rule: Rule, allowed: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..allowed {
            if self.is_basic[j] {
                continue;
            }
            let d = self.cost[j];
            let eff = if self.free[j] { -d.abs() } else { d };
            if eff >= -OPT_TOL {
                continue;
            }
            match rule {
                Rule::Bland => {
                    best = Some((j, eff));
                    break;
                }
                Rule::Dantzig => {
                    if best.is_none_or(|(_, b)| eff < b) {
                        best = Some((j, eff));
                    }
                }
            }
        }
        let (j, _) = best?;
        if self.free[j] && self.cost[j] > 0.0 {
            self.flip_column(j);
        }
        Some(j)
    }

    fn choose_leaving(&self, q: usize, rule: Rule) -> Option<usize> {
        let eligible = |i: usize| -> Option<f64> {
            let a = self.at(i, q);
            (a > PIVOT_TOL && !self.basic_is_free(i)).then_some(a)
        };
        match rule {
            Rule::Dantzig => {
                let mut bound = f64::INFINITY;
                for i in 0..self.rows {
                    if let Some(a) = eligible(i) {
                        bound = bound.min((self.rhs(i).max(0.0) + HARRIS_TOL) / a);
                    }
                }
                if !bound.is_finite() {
                    return None;
                }
                let mut best: Option<(usize, f64)> = None;
                for i in 0..self.rows {
                    if let Some(a) = eligible(i) {
                        if self.rhs(i).max(0.0) / a <= bound && best.is_none_or(|(_, b)| a > b) {
                            best = Some((i, a));
                        }
                    }
                }
                best.map(|(i, _)| i)
            }
            Rule::Bland => {
                let mut best: Option<(usize, f64)> = None;
                for i in 0..self.rows {
                    if let Some(a) = eligible(i) {
                        let ratio = self.rhs(i).max(0.0) / a;
                        let better = match best {
                            None => true,
                            Some((bi, br)) => {
                                ratio < br - 1e-12 * (1.0 + br.abs())
                                    || (ratio <= br + 1e-12 * (1.0 + br.abs())
                                        && self.basic_order(i) < self.basic_order(bi))
                            }
                        };
                        if better {
                            best = Some((i, ratio));
                        }
                    }
                }
                best.map(|(i, _)| i)
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let s = self.stride();
        let p = self.t[r * s + q];
        let mut prow: Vec<f64> = self.t[r * s..(r + 1) * s].to_vec();
        for v in prow.iter_mut() {
            *v /= p;
        }
        prow[q] = 1.0;
        let nz: Vec<usize> = (0..s).filter(|&k| prow[k] != 0.0).collect();
        let sparse = nz.len() * 2 < s;

        let eliminate = |row: &mut [f64]| {
            let f = row[q];
            if f == 0.0 {
                return;
            }
            if sparse {
                for &k in &nz {
                    row[k] -= f * prow[k];
                }
            } else {
                for (x, &pv) in row.iter_mut().zip(&prow) {
                    *x -= f * pv;
                }
            }
            row[q] = 0.0;
        };
        for i in 0..self.rows {
            if i != r {
                eliminate(&mut self.t[i * s..(i + 1) * s]);
                let rhs = self.t[i * s + self.cols];
                if rhs < 0.0 && rhs > -HARRIS_TOL && !self.basic_is_free(i) {
                    self.t[i * s + self.cols] = 0.0;
                }
            }
        }
        eliminate(&mut self.cost);
        self.t[r * s..(r + 1) * s].copy_from_slice(&prow);

        if let Basic::Col(old) = self.basis[r] {
            self.is_basic[old] = false;
        }
        self.basis[r] = Basic::Col(q);
        self.is_basic[q] = true;
        self.iterations += 1;
    }

    fn step(&mut self, rule: Rule, allowed: usize) -> Step {
        let Some(q) = self.choose_entering(rule, allowed) else {
            return Step::Optimal;
        };
        let Some(r) = self.choose_leaving(q, rule) else {
            return Step::Unbounded;
        };
        self.pivot(r, q);
        Step::Pivoted
    }

    /// Runs pivots until optimal or unbounded; `None` on iteration overflow.
    fn optimize(&mut self, dantzig_limit: usize, hard_limit: usize) -> Option<Step> {
        loop {
            if self.iterations >= hard_limit {
                return None;
            }
            let rule = if self.iterations < dantzig_limit {
                Rule::Dantzig
            } else {
                Rule::Bland
            };
            match self.step(rule, self.cols) {
                Step::Pivoted => {}
                done => return Some(done),
            }
        }
    }

    fn remove_row(&mut self, i: usize) {
        let s = self.stride();
        self.t.drain(i * s..(i + 1) * s);
        self.basis.remove(i);
        self.origin.remove(i);
        self.rows -= 1;
    }
}

/// Standard-form data kept for the final re-solve: `A x = b`, `x >= 0`
/// except free columns, with rows already sign-normalized.
struct StandardForm {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
    /// Sign applied to each original constraint row (ub rows first, then eq).
    row_sign: Vec<f64>,
    vars: Vec<VarMap>,
    n_ub: usize,
    n_eq: usize,
}

fn standard_form(p: &LpProblem) -> StandardForm {
    let n = p.num_vars();
    let mut vars = Vec::with_capacity(n);
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        let map = if lo.is_finite() {
            if hi.is_finite() {
                bound_rows.push((j, hi - lo));
            }
            VarMap { offset: lo, dir: 1.0, free: false }
        } else if hi.is_finite() {
            VarMap { offset: hi, dir: -1.0, free: false }
        } else {
            VarMap { offset: 0.0, dir: 1.0, free: true }
        };
        vars.push(map);
    }

    let n_ub = p.a_ub.nrows();
    let n_eq = p.a_eq.nrows();
    let n_bd = bound_rows.len();
    let rows = n_ub + n_eq + n_bd;
    let n_slack = n_ub + n_bd;
    let cols = n + n_slack;

    let mut a = DMatrix::zeros(rows, cols);
    let mut b = DVector::zeros(rows);
    let mut c = DVector::zeros(cols);
    for j in 0..n {
        c[j] = p.c[j] * vars[j].dir;
    }

    let mut fill = |row: usize, src: &DMatrix<f64>, src_row: usize, rhs: f64| {
        let mut r = rhs;
        for j in 0..n {
            let coeff = src[(src_row, j)];
            a[(row, j)] = coeff * vars[j].dir;
            r -= coeff * vars[j].offset;
        }
        b[row] = r;
    };
    for i in 0..n_ub {
        fill(i, &p.a_ub, i, p.b_ub[i]);
    }
    for i in 0..n_eq {
        fill(n_ub + i, &p.a_eq, i, p.b_eq[i]);
    }
    for i in 0..n_ub {
        a[(i, n + i)] = 1.0;
    }
    for (k, &(j, width)) in bound_rows.iter().enumerate() {
        let row = n_ub + n_eq + k;
        a[(row, j)] = 1.0;
        a[(row, n + n_ub + k)] = 1.0;
        b[row] = width;
    }

    let mut row_sign = vec![1.0; rows];
    for i in 0..rows {
        if b[i] < 0.0 {
            row_sign[i] = -1.0;
            b[i] = -b[i];
            a.row_mut(i).neg_mut();
        }
    }

    StandardForm {
        a,
        b,
        c,
        row_sign,
        vars,
        n_ub,
        n_eq,
    }
}

/// Solves the linear program. Never panics on well-formed input; malformed
/// input is reported as [`LpStatus::NumericalFailure`].
pub fn lp_solve(p: &LpProblem) -> LpResult {
    solve(p, None)
}

/// Like [`lp_solve`], starting phase two from `basis` (as reported in
/// [`LpResult::basis`]) when it is a nonsingular, primal feasible basis of
/// this problem. Otherwise solves from scratch.
pub fn lp_solve_from(p: &LpProblem, basis: &[usize]) -> LpResult {
    solve(p, Some(basis))
}

fn solve(p: &LpProblem, hint: Option<&[usize]>) -> LpResult {
    if p.validate().is_err() {
        return LpResult::failed(LpStatus::NumericalFailure, p, 0);
    }
    let sf = standard_form(p);
    let n = p.num_vars();
    let (rows, cols) = sf.a.shape();
    let s = cols + 1;
    let dantzig_limit = 50 * (rows + cols).max(1);
    let hard_limit = dantzig_limit + 200 * (rows + cols).max(1);

    let warm = hint.and_then(|b| warm_tableau(&sf, n, b));
    let mut tab = match warm {
        Some(tab) => tab,
        None => match cold_start(&sf, n, dantzig_limit, hard_limit) {
            Ok(tab) => tab,
            Err((status, iterations)) => return LpResult::failed(status, p, iterations),
        },
    };

    // Phase two.
    let mut c_cur: Vec<f64> = (0..cols).map(|j| sf.c[j] * tab.col_sign[j]).collect();
    tab.cost = vec![0.0; s];
    tab.cost[..cols].copy_from_slice(&c_cur);
    for i in 0..tab.rows {
        if let Basic::Col(j) = tab.basis[i] {
            let cb = c_cur[j];
            if cb != 0.0 {
                for k in 0..s {
                    tab.cost[k] -= cb * tab.t[i * s + k];
                }
            }
        }
    }
    match tab.optimize(dantzig_limit, hard_limit) {
        None => return LpResult::failed(LpStatus::NumericalFailure, p, tab.iterations),
        Some(Step::Unbounded) => return LpResult::failed(LpStatus::Unbounded, p, tab.iterations),
        Some(_) => {}
    }
    for j in 0..cols {
        c_cur[j] = sf.c[j] * tab.col_sign[j];
    }

    let mut x = DVector::zeros(cols);
    for i in 0..tab.rows {
        if let Basic::Col(j) = tab.basis[i] {
            x[j] = tab.rhs(i);
        }
    }
    let mut pi = DVector::zeros(rows);
    if let Some((xb, pib)) = resolve_basis(&sf, &tab, &c_cur) {
        let mut refined = x.clone();
        for (i, b) in tab.basis.iter().enumerate() {
            if let Basic::Col(j) = *b {
                refined[j] = xb[i];
            }
        }
        let sane = (0..cols).all(|j| tab.free[j] || refined[j] >= -PRIMAL_TOL);
        if sane {
            x = refined;
        }
        for (i, &orig) in tab.origin.iter().enumerate() {
            pi[orig] = pib[i];
        }
    }

    let y = DVector::from_fn(n, |j, _| {
        let map = sf.vars[j];
        let xj = if map.free { x[j] } else { x[j].max(0.0) };
        map.offset + map.dir * tab.col_sign[j] * xj
    });

    if !is_feasible(p, &y) {
        return LpResult::failed(LpStatus::NumericalFailure, p, tab.iterations);
    }

    let objective = p.c.dot(&y);
    let duals_ub = DVector::from_fn(sf.n_ub, |i, _| -sf.row_sign[i] * pi[i]);
    let duals_eq = DVector::from_fn(sf.n_eq, |i, _| -sf.row_sign[sf.n_ub + i] * pi[sf.n_ub + i]);
    let basis = tab
        .basis
        .iter()
        .filter_map(|b| match *b {
            Basic::Col(j) => Some(j),
            Basic::Artificial(_) => None,
        })
        .collect();
    LpResult {
        y,
        objective,
        status: LpStatus::Optimal,
        iterations: tab.iterations,
        duals_ub,
        duals_eq,
        basis,
    }
}

fn new_tableau(sf: &StandardForm, n: usize) -> Tableau {
    let (rows, cols) = sf.a.shape();
    Tableau {
        rows,
        cols,
        t: vec![0.0; rows * (cols + 1)],
        cost: vec![0.0; cols + 1],
        basis: Vec::with_capacity(rows),
        is_basic: vec![false; cols],
        free: (0..cols).map(|j| j < n && sf.vars[j].free).collect(),
        col_sign: vec![1.0; cols],
        origin: (0..rows).collect(),
        iterations: 0,
    }
}

/// Slack basis plus phase one. Leaves a tableau with no artificials.
fn cold_start(
    sf: &StandardForm,
    n: usize,
    dantzig_limit: usize,
    hard_limit: usize,
) -> Result<Tableau, (LpStatus, usize)> {
    let (rows, cols) = sf.a.shape();
    let s = cols + 1;
    let mut tab = new_tableau(sf, n);
    for i in 0..rows {
        for j in 0..cols {
            tab.t[i * s + j] = sf.a[(i, j)];
        }
        tab.t[i * s + cols] = sf.b[i];
        let slack = slack_column(i, n, sf.n_ub, sf.n_eq);
        match slack {
            Some(j) if sf.a[(i, j)] == 1.0 => {
                tab.basis.push(Basic::Col(j));
                tab.is_basic[j] = true;
            }
            _ => tab.basis.push(Basic::Artificial(i)),
        }
    }

    // Phase one: minimize the sum of artificials.
    let artificial_rows: Vec<usize> = (0..rows)
        .filter(|&i| matches!(tab.basis[i], Basic::Artificial(_)))
        .collect();
    if artificial_rows.is_empty() {
        return Ok(tab);
    }
    for &i in &artificial_rows {
        for k in 0..s {
            tab.cost[k] -= tab.t[i * s + k];
        }
    }
    match tab.optimize(dantzig_limit, hard_limit) {
        None | Some(Step::Unbounded) => return Err((LpStatus::NumericalFailure, tab.iterations)),
        Some(_) => {}
    }
    let infeasibility = -tab.cost[cols];
    let scale = 1.0 + sf.b.amax();
    if infeasibility > PRIMAL_TOL * scale {
        return Err((LpStatus::Infeasible, tab.iterations));
    }

    // Drive remaining (zero-level) artificials out, dropping redundant rows.
    let mut i = 0;
    while i < tab.rows {
        if matches!(tab.basis[i], Basic::Artificial(_)) {
            let pick = (0..cols)
                .filter(|&j| !tab.is_basic[j])
                .map(|j| (j, tab.at(i, j).abs()))
                .filter(|&(_, a)| a > PIVOT_TOL)
                .max_by(|x, y| x.1.total_cmp(&y.1));
            match pick {
                Some((j, _)) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => tab.remove_row(i),
            }
        } else {
            i += 1;
        }
    }
    Ok(tab)
}

/// Tableau `B⁻¹ [A | b]` for a hinted basis, if it is usable.
fn warm_tableau(sf: &StandardForm, n: usize, basis: &[usize]) -> Option<Tableau> {
    let (rows, cols) = sf.a.shape();
    if basis.len() != rows || rows == 0 || basis.iter().any(|&j| j >= cols) {
        return None;
    }
    let mut seen = vec![false; cols];
    for &j in basis {
        if std::mem::replace(&mut seen[j], true) {
            return None;
        }
    }
    let bmat = DMatrix::from_fn(rows, rows, |i, k| sf.a[(i, basis[k])]);
    let mut full = DMatrix::zeros(rows, cols + 1);
    full.view_mut((0, 0), (rows, cols)).copy_from(&sf.a);
    full.set_column(cols, &sf.b);
    let solved = bmat.lu().solve(&full)?;
    if solved.iter().any(|v| !v.is_finite()) {
        return None;
    }

    let mut tab = new_tableau(sf, n);
    let s = cols + 1;
    for i in 0..rows {
        for k in 0..s {
            tab.t[i * s + k] = solved[(i, k)];
        }
        let j = basis[i];
        let rhs = tab.t[i * s + cols];
        if !tab.free[j] {
            if rhs < -PRIMAL_TOL {
                return None;
            }
            tab.t[i * s + cols] = rhs.max(0.0);
        }
        for (r, &jb) in basis.iter().enumerate() {
            tab.t[i * s + jb] = if r == i { 1.0 } else { 0.0 };
        }
        tab.basis.push(Basic::Col(j));
        tab.is_basic[j] = true;
    }
    Some(tab)
}

fn slack_column(row: usize, n: usize, n_ub: usize, n_eq: usize) -> Option<usize> {
    if row < n_ub {
        Some(n + row)
    } else if row < n_ub + n_eq {
        None
    } else {
        Some(n + row - n_eq)
    }
}

/// Solves `B x_B = b` and `Bᵀ π = c_B` for the final basis using the
/// original standard-form data.
fn resolve_basis(
    sf: &StandardForm,
    tab: &Tableau,
    c_cur: &[f64],
) -> Option<(DVector<f64>, DVector<f64>)> {
    let m = tab.rows;
    let mut basis_cols = Vec::with_capacity(m);
    for b in &tab.basis {
        match *b {
            Basic::Col(j) => basis_cols.push(j),
            Basic::Artificial(_) => return None,
        }
    }
    if m == 0 {
        return Some((DVector::zeros(0), DVector::zeros(0)));
    }
    let bmat = DMatrix::from_fn(m, m, |i, k| {
        let j = basis_cols[k];
        sf.a[(tab.origin[i], j)] * tab.col_sign[j]
    });
    let rhs = DVector::from_fn(m, |i, _| sf.b[tab.origin[i]]);
    let cb = DVector::from_fn(m, |k, _| c_cur[basis_cols[k]]);
    let lu = bmat.clone().lu();
    let xb = lu.solve(&rhs)?;
    let pib = bmat.transpose().lu().solve(&cb)?;
    if xb.iter().chain(pib.iter()).any(|v| !v.is_finite()) {
        return None;
    }
    Some((xb, pib))
}

fn is_feasible(p: &LpProblem, y: &DVector<f64>) -> bool {
    if y.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let ub_ok = (&p.a_ub * y - &p.b_ub).iter().all(|&v| v <= PRIMAL_TOL);
    let eq_ok = (&p.a_eq * y - &p.b_eq).iter().all(|&v| v.abs() <= PRIMAL_TOL);
    let bounds_ok = y
        .iter()
        .zip(p.lower.iter().zip(&p.upper))
        .all(|(&v, (&lo, &hi))| v >= lo - PRIMAL_TOL && v <= hi + PRIMAL_TOL);
    ub_ok && eq_ok && bounds_ok
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn lower_bound_via_inequality() {
        let p = LpProblem::new(v(&[1.0])).with_ub(DMatrix::from_element(1, 1, -1.0), v(&[-3.0]));
        let r = lp_solve(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.y[0] - 3.0).abs() < 1e-12);
        assert!((r.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let p = LpProblem::new(v(&[0.0]))
            .with_ub(DMatrix::from_column_slice(2, 1, &[1.0, -1.0]), v(&[-1.0, -1.0]));
        assert_eq!(lp_solve(&p).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let p = LpProblem::new(v(&[-1.0]));
        assert_eq!(lp_solve(&p).status, LpStatus::Unbounded);
        let p = LpProblem::new(v(&[-1.0])).nonnegative();
        assert_eq!(lp_solve(&p).status, LpStatus::Unbounded);
    }

    #[test]
    fn textbook_two_variable() {
        // max 3a + 5b s.t. a <= 4, 2b <= 12, 3a + 2b <= 18, a,b >= 0.
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 3.0, 2.0]);
        let p = LpProblem::new(v(&[-3.0, -5.0]))
            .with_ub(a, v(&[4.0, 12.0, 18.0]))
            .nonnegative();
        let r = lp_solve(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.y[0] - 2.0).abs() < 1e-10);
        assert!((r.y[1] - 6.0).abs() < 1e-10);
        assert!((r.objective + 36.0).abs() < 1e-10);
        // Duals: c + Aᵀλ >= 0 with equality on basic variables.
        let red = &p.c + p.a_ub.transpose() * &r.duals_ub;
        assert!(red.amax() < 1e-10);
        assert!((-p.b_ub.dot(&r.duals_ub) - r.objective).abs() < 1e-10);
    }

    #[test]
    fn equality_and_box_bounds() {
        // min -a - b s.t. a + b = 1.5, 0 <= a <= 1, 0.25 <= b <= 1.
        let p = LpProblem::new(v(&[-1.0, -2.0]))
            .with_eq(DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), v(&[1.5]))
            .with_bounds(vec![0.0, 0.25], vec![1.0, 1.0]);
        let r = lp_solve(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.y[0] - 0.5).abs() < 1e-10);
        assert!((r.y[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn upper_bound_only() {
        let p = LpProblem::new(v(&[-1.0])).with_bounds(vec![f64::NEG_INFINITY], vec![2.5]);
        let r = lp_solve(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.y[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn free_variable_goes_negative() {
        // min y s.t. y >= -4 written as -y <= 4.
        let p = LpProblem::new(v(&[1.0])).with_ub(DMatrix::from_element(1, 1, -1.0), v(&[4.0]));
        let r = lp_solve(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.y[0] + 4.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_input_is_reported() {
        let mut p = LpProblem::new(v(&[1.0, 2.0]));
        p.lower.pop();
        assert_eq!(lp_solve(&p).status, LpStatus::NumericalFailure);
        let p = LpProblem::new(v(&[f64::NAN]));
        assert_eq!(lp_solve(&p).status, LpStatus::NumericalFailure);
    }

    #[test]
    fn redundant_equalities() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let p = LpProblem::new(v(&[1.0, 3.0])).with_eq(a, v(&[1.0, 2.0])).nonnegative();
        let r = lp_solve(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-10);
    }

    #[test]
    fn empty_problem() {
        let r = lp_solve(&LpProblem::new(DVector::zeros(0)));
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.objective, 0.0);
    }
}

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::time::{Duration, Instant};

use super::{IlpError, IlpModel, IlpSolution, Sense, SolveStatus, SolverConfig, FLOAT_TOLERANCE};

trait Scalar:
    Copy
    + PartialOrd
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    const ZERO: Self;
    const ONE: Self;
    const TOL: Self;
    fn from_f64(x: f64) -> Self;
}

impl Scalar for i64 {
    const ZERO: Self = 0;
    const ONE: Self = 1;
    const TOL: Self = 0;
    fn from_f64(x: f64) -> Self {
        x as i64
    }
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const TOL: Self = FLOAT_TOLERANCE;
    fn from_f64(x: f64) -> Self {
        x
    }
}

fn min0<T: Scalar>(a: T) -> T {
    if a < T::ZERO {
        a
    } else {
        T::ZERO
    }
}

fn max<T: Scalar>(a: T, b: T) -> T {
    if a > b {
        a
    } else {
        b
    }
}

fn abs<T: Scalar>(a: T) -> T {
    if a < T::ZERO {
        -a
    } else {
        a
    }
}

/// A row in `sum a x <= rhs` form.
struct Row<T> {
    coeffs: Vec<(usize, T)>,
    rhs: T,
    max_abs: T,
}

const FREE: i8 = -1;

struct Search<T> {
    obj: Vec<T>,
    rows: Vec<Row<T>>,
    var_rows: Vec<Vec<(usize, T)>>,
    value: Vec<i8>,
    /// Smallest activity each row can still reach given the fixed variables.
    min_act: Vec<T>,
    trail: Vec<usize>,
    fixed_obj: T,
    queue: Vec<usize>,
    queued: Vec<bool>,
    // Optimistic bound bookkeeping. Variables of an at-most-one row can
    // contribute at most their largest coefficient together.
    group_of: Vec<Option<usize>>,
    groups: Vec<Vec<usize>>,
    group_max: Vec<T>,
    group_sum: T,
    free_pos: T,
    // Rows that still need one more variable switched on, where every
    // candidate costs objective, add the cheapest such cost as a penalty.
    cover_of: Vec<Option<usize>>,
    covers: Vec<Cover<T>>,
    cover_pen: Vec<T>,
    cover_sum: T,
}

/// `sum a x >= need` with positive `a`, over variables with negative
/// objective coefficients.
struct Cover<T> {
    vars: Vec<(usize, T)>,
    need: T,
}

impl<T: Scalar> Search<T> {
    fn build(model: &IlpModel) -> Option<Self> {
        let n = model.num_vars();
        let mut obj = vec![T::ZERO; n];
        for (v, c) in &model.objective {
            obj[*v] += T::from_f64(*c);
        }
        let mut rows = Vec::new();
        for c in &model.constraints {
            let mut dense: Vec<(usize, f64)> = c.coeffs.clone();
            dense.sort_by_key(|(v, _)| *v);
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(dense.len());
            for (v, a) in dense {
                match merged.last_mut() {
                    Some((lv, la)) if *lv == v => *la += T::from_f64(a),
                    _ => merged.push((v, T::from_f64(a))),
                }
            }
            merged.retain(|(_, a)| *a != T::ZERO);
            let rhs = T::from_f64(c.rhs);
            let neg = |m: &[(usize, T)]| m.iter().map(|&(v, a)| (v, -a)).collect::<Vec<_>>();
            match c.sense {
                Sense::Le => rows.push((merged, rhs)),
                Sense::Ge => rows.push((neg(&merged), -rhs)),
                Sense::Eq => {
                    rows.push((neg(&merged), -rhs));
                    rows.push((merged, rhs));
                }
            }
        }
        let mut var_rows = vec![Vec::new(); n];
        let mut min_act = Vec::with_capacity(rows.len());
        let mut built = Vec::with_capacity(rows.len());
        for (coeffs, rhs) in rows {
            let mut m = T::ZERO;
            let mut max_abs = T::ZERO;
            for &(v, a) in &coeffs {
                m += min0(a);
                max_abs = max(max_abs, abs(a));
                var_rows[v].push((built.len(), a));
            }
            if coeffs.is_empty() && T::ZERO > rhs + T::TOL {
                return None;
            }
            min_act.push(m);
            built.push(Row { coeffs, rhs, max_abs });
        }

        let mut group_of = vec![None; n];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for row in &built {
            let at_most_one = row.coeffs.len() > 1 && row.rhs == T::ONE && row.coeffs.iter().all(|(_, a)| *a == T::ONE);
            if !at_most_one {
                continue;
            }
            let members: Vec<usize> = row
                .coeffs
                .iter()
                .map(|(v, _)| *v)
                .filter(|v| group_of[*v].is_none() && obj[*v] > T::ZERO)
                .collect();
            if members.len() < 2 {
                continue;
            }
            for &v in &members {
                group_of[v] = Some(groups.len());
            }
            groups.push(members);
        }
        let mut cover_of = vec![None; n];
        let mut covers: Vec<Cover<T>> = Vec::new();
        for row in &built {
            let is_cover = !row.coeffs.is_empty()
                && row.rhs < T::ZERO
                && row
                    .coeffs
                    .iter()
                    .all(|&(v, a)| a < T::ZERO && obj[v] < T::ZERO && cover_of[v].is_none() && group_of[v].is_none());
            if !is_cover {
                continue;
            }
            for &(v, _) in &row.coeffs {
                cover_of[v] = Some(covers.len());
            }
            covers.push(Cover {
                vars: row.coeffs.iter().map(|&(v, a)| (v, -a)).collect(),
                need: -row.rhs,
            });
        }
        let mut free_pos = T::ZERO;
        for v in 0..n {
            if group_of[v].is_none() && obj[v] > T::ZERO {
                free_pos += obj[v];
            }
        }
        let rows_len = built.len();
        let mut s = Search {
            obj,
            rows: built,
            var_rows,
            value: vec![FREE; n],
            min_act,
            trail: Vec::new(),
            fixed_obj: T::ZERO,
            queue: Vec::new(),
            queued: vec![false; rows_len],
            group_of,
            group_max: vec![T::ZERO; groups.len()],
            groups,
            group_sum: T::ZERO,
            free_pos,
            cover_of,
            cover_pen: vec![T::ZERO; covers.len()],
            covers,
            cover_sum: T::ZERO,
        };
        for c in 0..s.covers.len() {
            let p = s.compute_cover_pen(c);
            s.cover_pen[c] = p;
            s.cover_sum += p;
        }
        for g in 0..s.groups.len() {
            let m = s.compute_group_max(g);
            s.group_max[g] = m;
            s.group_sum += m;
        }
        Some(s)
    }

    fn compute_group_max(&self, g: usize) -> T {
        let mut m = T::ZERO;
        for &v in &self.groups[g] {
            if self.value[v] == FREE {
                m = max(m, self.obj[v]);
            }
        }
        m
    }

    fn compute_cover_pen(&self, c: usize) -> T {
        let cover = &self.covers[c];
        let mut have = T::ZERO;
        let mut cheapest: Option<T> = None;
        for &(v, a) in &cover.vars {
            match self.value[v] {
                1 => have += a,
                FREE => {
                    let cost = -self.obj[v];
                    if cheapest.is_none_or(|m| cost < m) {
                        cheapest = Some(cost);
                    }
                }
                _ => {}
            }
        }
        if have + T::TOL >= cover.need {
            return T::ZERO;
        }
        cheapest.unwrap_or(T::ZERO)
    }

    fn refresh_cover(&mut self, v: usize) {
        if let Some(c) = self.cover_of[v] {
            let p = self.compute_cover_pen(c);
            self.cover_sum -= self.cover_pen[c];
            self.cover_sum += p;
            self.cover_pen[c] = p;
        }
    }

    fn refresh_group(&mut self, v: usize) {
        if let Some(g) = self.group_of[v] {
            let m = self.compute_group_max(g);
            self.group_sum -= self.group_max[g];
            self.group_sum += m;
            self.group_max[g] = m;
        }
    }

    fn bound(&self) -> T {
        self.fixed_obj + self.free_pos + self.group_sum - self.cover_sum
    }

    fn fix(&mut self, v: usize, val: bool) {
        debug_assert_eq!(self.value[v], FREE);
        self.value[v] = val as i8;
        self.trail.push(v);
        let c = self.obj[v];
        if val {
            self.fixed_obj += c;
        }
        if self.group_of[v].is_some() {
            self.refresh_group(v);
        } else if c > T::ZERO {
            self.free_pos -= c;
        }
        self.refresh_cover(v);
        for k in 0..self.var_rows[v].len() {
            let (r, a) = self.var_rows[v][k];
            if val {
                self.min_act[r] += a - min0(a);
            } else {
                self.min_act[r] -= min0(a);
            }
            if !self.queued[r] {
                self.queued[r] = true;
                self.queue.push(r);
            }
        }
    }

    fn unfix_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail entry");
            let val = self.value[v] == 1;
            self.value[v] = FREE;
            let c = self.obj[v];
            if val {
                self.fixed_obj -= c;
            }
            if self.group_of[v].is_some() {
                self.refresh_group(v);
            } else if c > T::ZERO {
                self.free_pos += c;
            }
            self.refresh_cover(v);
            for &(r, a) in &self.var_rows[v] {
                if val {
                    self.min_act[r] -= a - min0(a);
                } else {
                    self.min_act[r] += min0(a);
                }
            }
        }
    }

    fn clear_queue(&mut self) {
        for r in self.queue.drain(..) {
            self.queued[r] = false;
        }
    }

    /// Fixes every variable implied by a row; false on a violated row.
    fn propagate(&mut self) -> bool {
        while let Some(r) = self.queue.pop() {
            self.queued[r] = false;
            let slack = self.rows[r].rhs - self.min_act[r];
            if slack < -T::TOL {
                self.clear_queue();
                return false;
            }
            if !(self.rows[r].max_abs > slack + T::TOL) {
                continue;
            }
            for k in 0..self.rows[r].coeffs.len() {
                let (v, a) = self.rows[r].coeffs[k];
                if self.value[v] != FREE {
                    continue;
                }
                if a > slack + T::TOL {
                    self.fix(v, false);
                } else if -a > slack + T::TOL {
                    self.fix(v, true);
                }
            }
        }
        true
    }

    fn first_free(&self, from: usize) -> Option<usize> {
        (from..self.value.len()).find(|&v| self.value[v] == FREE)
    }

    fn preferred(&self, v: usize) -> bool {
        self.obj[v] > T::ZERO
    }

    fn snapshot(&self) -> Vec<bool> {
        self.value.iter().map(|&x| x == 1).collect()
    }

    /// Visits free variables in order and fixes each to its first value
    /// (zero, or the value the objective favours when `guided`), falling
    /// back to the other value. Never backtracks; returns a complete
    /// assignment when it gets through.
    fn dive(&mut self, guided: bool) -> Option<(Vec<bool>, T)> {
        let mark = self.trail.len();
        let mut result = None;
        let mut v = 0;
        let ok = loop {
            let Some(next) = self.first_free(v) else { break true };
            v = next;
            let m = self.trail.len();
            let first = guided && self.preferred(v);
            self.fix(v, first);
            if self.propagate() {
                continue;
            }
            self.unfix_to(m);
            self.fix(v, !first);
            if !self.propagate() {
                break false;
            }
        };
        if ok {
            result = Some((self.snapshot(), self.fixed_obj));
        }
        self.unfix_to(mark);
        result
    }
}

struct Frame {
    var: usize,
    mark: usize,
    first: bool,
    second_tried: bool,
}

/// Solves the model to optimality or until the time limit.
///
/// Branching follows declaration order and tries the value favoured by the
/// objective first. Before the search two greedy passes, one preferring
/// zeros and one following the objective, seed the incumbent, so a feasible
/// answer is usually available even on timeout.
pub fn solve(model: &IlpModel, config: &SolverConfig) -> Result<IlpSolution, IlpError> {
    model.validate()?;
    let deadline = Instant::now() + Duration::from_millis(config.time_limit_ms);
    let (assignment, timed_out) = if model.is_integral() {
        run::<i64>(model, deadline)?
    } else {
        run::<f64>(model, deadline)?
    };
    if !model.is_feasible(&assignment) {
        return Err(IlpError::InvalidModel(format!(
            "search returned an assignment violating {:?}",
            model.violations(&assignment)
        )));
    }
    Ok(IlpSolution {
        objective_value: model.evaluate(&assignment),
        objective_int: model.evaluate_int(&assignment),
        assignment,
        status: if timed_out { SolveStatus::Timeout } else { SolveStatus::Optimal },
    })
}

fn run<T: Scalar>(model: &IlpModel, deadline: Instant) -> Result<(Vec<bool>, bool), IlpError> {
    let Some(mut s) = Search::<T>::build(model) else {
        return Err(IlpError::Infeasible);
    };
    for r in 0..s.rows.len() {
        s.queued[r] = true;
        s.queue.push(r);
    }
    if !s.propagate() {
        return Err(IlpError::Infeasible);
    }
    let mut best: Option<(Vec<bool>, T)> = s.dive(false);
    if let Some((assignment, value)) = s.dive(true) {
        if best.as_ref().is_none_or(|(_, b)| value > *b + T::TOL) {
            best = Some((assignment, value));
        }
    }

    // First search only among variables that pay off, with every costly
    // variable held at zero. When the optimum needs few costly variables
    // this finds a strong incumbent long before the full search would.
    let now = Instant::now();
    let half = now + deadline.saturating_duration_since(now) / 2;
    let mark = s.trail.len();
    for v in 0..s.value.len() {
        if s.value[v] == FREE && s.obj[v] < T::ZERO {
            s.fix(v, false);
        }
    }
    if s.propagate() {
        branch_and_bound(&mut s, &mut best, half);
    }
    s.unfix_to(mark);

    let timed_out = branch_and_bound(&mut s, &mut best, deadline);
    match best {
        Some((assignment, _)) => Ok((assignment, timed_out)),
        None if timed_out => Err(IlpError::TimeoutWithoutIncumbent),
        None => Err(IlpError::Infeasible),
    }
}

/// Depth-first search below the current node. Returns true when the
/// deadline cut it short. Leaves the search state as it found it.
fn branch_and_bound<T: Scalar>(s: &mut Search<T>, best: &mut Option<(Vec<bool>, T)>, deadline: Instant) -> bool {
    let mut frames: Vec<Frame> = Vec::new();
    let mut nodes: u64 = 0;
    let mut timed_out = false;
    let root_mark = s.trail.len();

    // Each iteration sits at a consistent node; `descend` is false when the
    // node must be abandoned and the search has to backtrack.
    'search: loop {
        nodes += 1;
        if nodes.is_multiple_of(256) && Instant::now() >= deadline {
            timed_out = true;
            break;
        }
        let prune = match best {
            Some((_, b)) => !(s.bound() > *b + T::TOL),
            None => false,
        };
        let mut descend = !prune;
        if descend {
            let from = frames.last().map_or(0, |f| f.var + 1);
            match s.first_free(from) {
                None => {
                    let improves = match best {
                        Some((_, b)) => s.fixed_obj > *b + T::TOL,
                        None => true,
                    };
                    if improves {
                        *best = Some((s.snapshot(), s.fixed_obj));
                    }
                    descend = false;
                }
                Some(v) => {
                    let first = s.preferred(v);
                    let mark = s.trail.len();
                    frames.push(Frame {
                        var: v,
                        mark,
                        first,
                        second_tried: false,
                    });
                    s.fix(v, first);
                    if s.propagate() {
                        continue 'search;
                    }
                    descend = false;
                }
            }
        }
        debug_assert!(!descend);
        // Backtrack to the deepest frame with an untried branch.
        loop {
            let Some(top) = frames.last_mut() else { break 'search };
            let (var, mark, first, second_tried) = (top.var, top.mark, top.first, top.second_tried);
            s.unfix_to(mark);
            if second_tried {
                frames.pop();
                continue;
            }
            top.second_tried = true;
            s.fix(var, !first);
            if s.propagate() {
                continue 'search;
            }
        }
    }
    s.clear_queue();
    s.unfix_to(root_mark);
    timed_out
}

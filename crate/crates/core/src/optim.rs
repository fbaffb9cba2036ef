//! Derivative-free maximization: Powell's conjugate-direction method with a
//! Brent line search, and an integer neighbourhood polish.

const GOLD: f64 = 1.618_033_988_749_895;
const CGOLD: f64 = 0.381_966_011_250_105;
const TINY: f64 = 1e-20;
const MAX_BRACKET_STEPS: usize = 60;
const MAX_BRENT_STEPS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct PowellOptions {
    /// Stop once a full sweep improves the objective by less than this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Length of the initial search directions.
    pub initial_step: f64,
    /// Relative precision of each line search.
    pub line_tolerance: f64,
    /// Evaluate the objective at `max(x, 0)` and return a nonnegative point.
    pub nonnegative: bool,
}

impl Default for PowellOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iterations: 200, initial_step: 1.0, line_tolerance: 1e-6, nonnegative: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowellResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Completed outer sweeps.
    pub iterations: usize,
    pub evaluations: usize,
    /// False when the sweep cap stopped the search.
    pub converged: bool,
}

struct Counted<F> {
    f: F,
    evaluations: usize,
    nonnegative: bool,
    scratch: Vec<f64>,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    /// Negated objective, so the search below is a minimization.
    fn cost(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        self.scratch.clear();
        self.scratch.extend(x.iter().map(|&v| if self.nonnegative { v.max(0.0) } else { v }));
        let v = -(self.f)(&self.scratch);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn along(&mut self, p: &[f64], d: &[f64], t: f64) -> f64 {
        let x: Vec<f64> = p.iter().zip(d).map(|(a, b)| a + t * b).collect();
        self.cost(&x)
    }

    /// Minimizes along `p + t d`; returns `(t, cost)`.
    fn line_min(&mut self, p: &[f64], d: &[f64], f0: f64, tol: f64) -> (f64, f64) {
        let (mut a, mut b) = (0.0, 1.0);
        let (mut fa, mut fb) = (f0, self.along(p, d, b));
        if fb > fa {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
        let mut c = b + GOLD * (b - a);
        let mut fc = self.along(p, d, c);
        let mut steps = 0;
        while fb > fc && steps < MAX_BRACKET_STEPS {
            steps += 1;
            let r = (b - a) * (fb - fc);
            let q = (b - c) * (fb - fa);
            let denom = 2.0 * (q - r).abs().max(TINY).copysign(q - r);
            let mut u = b - ((b - c) * q - (b - a) * r) / denom;
            let ulim = b + 100.0 * (c - b);
            let mut fu;
            if (b - u) * (u - c) > 0.0 {
                fu = self.along(p, d, u);
                if fu < fc {
                    (a, b, fa, fb) = (b, u, fb, fu);
                    break;
                } else if fu > fb {
                    (c, fc) = (u, fu);
                    break;
                }
                u = c + GOLD * (c - b);
                fu = self.along(p, d, u);
            } else if (c - u) * (u - ulim) > 0.0 {
                fu = self.along(p, d, u);
                if fu < fc {
                    (b, c) = (c, u);
                    u = c + GOLD * (c - b);
                    (fb, fc) = (fc, fu);
                    fu = self.along(p, d, u);
                }
            } else if (u - ulim) * (ulim - c) >= 0.0 {
                u = ulim;
                fu = self.along(p, d, u);
            } else {
                u = c + GOLD * (c - b);
                fu = self.along(p, d, u);
            }
            (a, b, c) = (b, c, u);
            (fa, fb, fc) = (fb, fc, fu);
        }
        let _ = fa;
        if fc < fb {
            // Bracketing gave up while still descending; take the best point seen.
            return (c, fc);
        }
        self.brent(p, d, a, b, c, fb, tol)
    }

    #[allow(clippy::too_many_arguments)]
    fn brent(&mut self, p: &[f64], d: &[f64], ax: f64, bx: f64, cx: f64, fbx: f64, tol: f64) -> (f64, f64) {
        let (mut a, mut b) = if ax < cx { (ax, cx) } else { (cx, ax) };
        let (mut x, mut w, mut v) = (bx, bx, bx);
        let (mut fx, mut fw, mut fv) = (fbx, fbx, fbx);
        let (mut dstep, mut e): (f64, f64) = (0.0, 0.0);
        for _ in 0..MAX_BRENT_STEPS {
            let xm = 0.5 * (a + b);
            let tol1 = tol * x.abs() + 1e-10;
            let tol2 = 2.0 * tol1;
            if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
                break;
            }
            if e.abs() > tol1 {
                let r = (x - w) * (fx - fv);
                let mut q = (x - v) * (fx - fw);
                let mut pp = (x - v) * q - (x - w) * r;
                q = 2.0 * (q - r);
                if q > 0.0 {
                    pp = -pp;
                }
                q = q.abs();
                let etemp = e;
                e = dstep;
                if pp.abs() >= (0.5 * q * etemp).abs() || pp <= q * (a - x) || pp >= q * (b - x) {
                    e = if x >= xm { a - x } else { b - x };
                    dstep = CGOLD * e;
                } else {
                    dstep = pp / q;
                    let u = x + dstep;
                    if u - a < tol2 || b - u < tol2 {
                        dstep = tol1.copysign(xm - x);
                    }
                }
            } else {
                e = if x >= xm { a - x } else { b - x };
                dstep = CGOLD * e;
            }
            let u = if dstep.abs() >= tol1 { x + dstep } else { x + tol1.copysign(dstep) };
            let fu = self.along(p, d, u);
            if fu <= fx {
                if u >= x {
                    a = x;
                } else {
                    b = x;
                }
                (v, w, x) = (w, x, u);
                (fv, fw, fx) = (fw, fx, fu);
            } else {
                if u < x {
                    a = u;
                } else {
                    b = u;
                }
                if fu <= fw || w == x {
                    (v, w) = (w, u);
                    (fv, fw) = (fw, fu);
                } else if fu <= fv || v == x || v == w {
                    v = u;
                    fv = fu;
                }
            }
        }
        (x, fx)
    }
}

/// Maximizes `f` from `x0` with Powell's method.
///
/// The returned value is never below `f(x0)`.
pub fn powell_optimize<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], options: &PowellOptions) -> PowellResult {
    let n = x0.len();
    let mut obj = Counted { f, evaluations: 0, nonnegative: options.nonnegative, scratch: Vec::with_capacity(n) };
    let project = |x: &[f64]| -> Vec<f64> { x.iter().map(|&v| if options.nonnegative { v.max(0.0) } else { v }).collect() };

    let mut dirs: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { options.initial_step } else { 0.0 }).collect()).collect();
    let mut p = project(x0);
    let mut fret = obj.cost(&p);
    let mut pt = p.clone();
    let mut iterations = 0;
    let mut converged = n == 0;

    while !converged && iterations < options.max_iterations {
        iterations += 1;
        let fp = fret;
        let (mut ibig, mut del) = (0, 0.0);
        for (i, d) in dirs.iter().enumerate() {
            let before = fret;
            let (t, f_new) = obj.line_min(&p, d, fret, options.line_tolerance);
            if f_new < fret {
                for (pj, dj) in p.iter_mut().zip(d) {
                    *pj += t * dj;
                }
                fret = f_new;
            }
            if before - fret > del {
                del = before - fret;
                ibig = i;
            }
        }
        if fp - fret < options.tolerance {
            converged = true;
            break;
        }
        let ptt: Vec<f64> = p.iter().zip(&pt).map(|(a, b)| 2.0 * a - b).collect();
        let xit: Vec<f64> = p.iter().zip(&pt).map(|(a, b)| a - b).collect();
        pt.clone_from(&p);
        let fptt = obj.cost(&ptt);
        if fptt < fp {
            let t = 2.0 * (fp - 2.0 * fret + fptt) * (fp - fret - del).powi(2) - del * (fp - fptt).powi(2);
            if t < 0.0 {
                let (s, f_new) = obj.line_min(&p, &xit, fret, options.line_tolerance);
                if f_new < fret {
                    for (pj, dj) in p.iter_mut().zip(&xit) {
                        *pj += s * dj;
                    }
                    fret = f_new;
                }
                dirs[ibig] = dirs[n - 1].clone();
                dirs[n - 1] = xit;
            }
        }
    }
    PowellResult { x: project(&p), value: -fret, iterations, evaluations: obj.evaluations, converged }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolishResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Objective at the plain rounding of the input.
    pub rounded_value: f64,
    pub evaluations: usize,
}

/// Best point among `round(x)` and its `3^n` neighbours in `{-1, 0, 1}^n`
/// offsets, skipping points with negative coordinates. Ties keep the rounding.
pub fn integer_polish<F: FnMut(&[f64]) -> f64>(x: &[f64], mut f: F) -> PolishResult {
    let n = x.len();
    let center: Vec<f64> = x.iter().map(|v| v.round().max(0.0)).collect();
    let rounded_value = f(&center);
    let mut best = (center.clone(), rounded_value);
    let mut evaluations = 1;
    let total = 3usize.pow(n as u32);
    let mut cand = vec![0.0; n];
    for code in 0..total {
        let mut k = code;
        let mut is_center = true;
        let mut valid = true;
        for j in 0..n {
            let off = (k % 3) as f64 - 1.0;
            k /= 3;
            is_center &= off == 0.0;
            cand[j] = center[j] + off;
            valid &= cand[j] >= 0.0;
        }
        if is_center || !valid {
            continue;
        }
        evaluations += 1;
        let v = f(&cand);
        if v > best.1 {
            best = (cand.clone(), v);
        }
    }
    PolishResult { x: best.0, value: best.1, rounded_value, evaluations }
}

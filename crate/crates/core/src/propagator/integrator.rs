//! Explicit Runge–Kutta integration of `y' = f(t, A(t), y)` over a flattened complex state.

use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;
use crate::system::PeriodicSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classical fourth order with a fixed step.
    Rk4,
    /// Dormand–Prince 5(4) with embedded error control.
    DormandPrince,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::DormandPrince => "dopri5",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rk4" | "rk4-fixed" => Ok(Method::Rk4),
            "dopri5" | "dormand-prince" | "adaptive" => Ok(Method::DormandPrince),
            other => Err(Error::Parse(format!(
                "unknown integrator `{other}` (expected rk4|dopri5)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorSettings<T> {
    pub method: Method,
    /// RK4 step; `None` means `q/2000`.
    pub step: Option<T>,
    pub rel_tol: T,
    pub abs_tol: T,
    /// Budget of attempted steps per integration call.
    pub max_steps: usize,
}

impl<T: Real> Default for IntegratorSettings<T> {
    fn default() -> Self {
        Self {
            method: Method::Rk4,
            step: None,
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-12),
            max_steps: 20_000_000,
        }
    }
}

impl<T: Real> IntegratorSettings<T> {
    pub fn rk4(step: T) -> Self {
        Self {
            step: Some(step),
            ..Self::default()
        }
    }

    pub fn dormand_prince() -> Self {
        Self {
            method: Method::DormandPrince,
            ..Self::default()
        }
    }

    pub fn step_for(&self, period: T) -> T {
        self.step.unwrap_or(period / T::lit(2000.0))
    }

    pub fn validate(&self, period: T) -> Result<()> {
        match self.method {
            Method::Rk4 => {
                let h = self.step_for(period);
                if !(h > T::zero()) || !h.is_finite() {
                    return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
                }
                if h > period / T::lit(50.0) * (T::one() + T::epsilon()) {
                    return Err(Error::InvalidArgument(format!(
                        "step {h} is coarser than period/50 = {}",
                        period / T::lit(50.0)
                    )));
                }
            }
            Method::DormandPrince => {
                if !(self.rel_tol > T::zero()) || !(self.abs_tol > T::zero()) {
                    return Err(Error::InvalidArgument("tolerances must be positive".into()));
                }
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidArgument("max_steps must be positive".into()));
        }
        Ok(())
    }
}

type C<T> = Complex<T>;

/// Integrates `y` from `t0` to `t1` (either direction) in place; returns the number of attempted steps.
pub(crate) fn integrate<T, F>(
    system: &PeriodicSystem<T>,
    settings: &IntegratorSettings<T>,
    t0: T,
    t1: T,
    y: &mut [C<T>],
    rhs: F,
) -> Result<usize>
where
    T: Real,
    F: Fn(T, &ComplexMatrix<T>, &[C<T>], &mut [C<T>]),
{
    if t0 == t1 {
        return Ok(0);
    }
    let forward = t1 > t0;
    let mut intervals = if forward {
        system.smooth_intervals(t0, t1)
    } else {
        system.smooth_intervals(t1, t0)
    };
    if !forward {
        intervals.reverse();
        for iv in &mut intervals {
            std::mem::swap(&mut iv.start, &mut iv.end);
        }
    }
    let mut work = Work::new(y.len());
    let mut steps = 0usize;
    let mut h_adaptive = None;
    for iv in &intervals {
        let f = |t: T, y: &[C<T>], dy: &mut [C<T>]| rhs(t, &system.coefficient_at(iv, t), y, dy);
        match settings.method {
            Method::Rk4 => rk4(settings, system.period, iv.start, iv.end, y, &f, &mut work, &mut steps)?,
            Method::DormandPrince => dopri5(
                settings,
                system.period,
                iv.start,
                iv.end,
                y,
                &f,
                &mut work,
                &mut steps,
                &mut h_adaptive,
            )?,
        }
    }
    Ok(steps)
}

struct Work<T> {
    k: [Vec<C<T>>; 7],
    tmp: Vec<C<T>>,
    next: Vec<C<T>>,
}

impl<T: Real> Work<T> {
    fn new(n: usize) -> Self {
        let z = vec![C::new(T::zero(), T::zero()); n];
        Self {
            k: std::array::from_fn(|_| z.clone()),
            tmp: z.clone(),
            next: z,
        }
    }
}

fn finite<T: Real>(y: &[C<T>]) -> bool {
    y.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `out = y + h Σ coef_j k_j`.
fn combine<T: Real>(out: &mut [C<T>], y: &[C<T>], h: T, terms: &[(T, &[C<T>])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C::new(T::zero(), T::zero());
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        *o = y[i] + acc * h;
    }
}

#[allow(clippy::too_many_arguments)]
fn rk4<T, F>(
    settings: &IntegratorSettings<T>,
    period: T,
    a: T,
    b: T,
    y: &mut [C<T>],
    f: &F,
    work: &mut Work<T>,
    steps: &mut usize,
) -> Result<()>
where
    T: Real,
    F: Fn(T, &[C<T>], &mut [C<T>]),
{
    let target = settings.step_for(period);
    let n = ((b - a).abs() / target).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    if steps.saturating_add(n) > settings.max_steps {
        return Err(Error::StepLimitExceeded {
            limit: settings.max_steps,
        });
    }
    let h = (b - a) / T::from_usize_lossy(n);
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let third = T::one() / T::lit(3.0);
    let [k1, k2, k3, k4, ..] = &mut work.k;
    for s in 0..n {
        let t = a + h * T::from_usize_lossy(s);
        f(t, y, k1);
        combine(&mut work.tmp, y, h, &[(half, k1)]);
        f(t + h * half, &work.tmp, k2);
        combine(&mut work.tmp, y, h, &[(half, k2)]);
        f(t + h * half, &work.tmp, k3);
        combine(&mut work.tmp, y, h, &[(T::one(), k3)]);
        let t_end = if s + 1 == n { b } else { t + h };
        f(t_end, &work.tmp, k4);
        combine(
            &mut work.tmp,
            y,
            h,
            &[(sixth, k1), (third, k2), (third, k3), (sixth, k4)],
        );
        y.copy_from_slice(&work.tmp);
        if !finite(y) {
            return Err(Error::NonFinite { t: t_end.as_f64() });
        }
    }
    *steps += n;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn dopri5<T, F>(
    settings: &IntegratorSettings<T>,
    period: T,
    a: T,
    b: T,
    y: &mut [C<T>],
    f: &F,
    work: &mut Work<T>,
    steps: &mut usize,
    h_carry: &mut Option<T>,
) -> Result<()>
where
    T: Real,
    F: Fn(T, &[C<T>], &mut [C<T>]),
{
    let l = T::lit;
    let (c2, c3, c4, c5) = (l(0.2), l(0.3), l(0.8), l(8.0 / 9.0));
    let a21 = l(0.2);
    let (a31, a32) = (l(3.0 / 40.0), l(9.0 / 40.0));
    let (a41, a42, a43) = (l(44.0 / 45.0), l(-56.0 / 15.0), l(32.0 / 9.0));
    let (a51, a52, a53, a54) = (
        l(19372.0 / 6561.0),
        l(-25360.0 / 2187.0),
        l(64448.0 / 6561.0),
        l(-212.0 / 729.0),
    );
    let (a61, a62, a63, a64, a65) = (
        l(9017.0 / 3168.0),
        l(-355.0 / 33.0),
        l(46732.0 / 5247.0),
        l(49.0 / 176.0),
        l(-5103.0 / 18656.0),
    );
    let (b1, b3, b4, b5, b6) = (
        l(35.0 / 384.0),
        l(500.0 / 1113.0),
        l(125.0 / 192.0),
        l(-2187.0 / 6784.0),
        l(11.0 / 84.0),
    );
    let (e1, e3, e4, e5, e6, e7) = (
        l(71.0 / 57600.0),
        l(-71.0 / 16695.0),
        l(71.0 / 1920.0),
        l(-17253.0 / 339200.0),
        l(22.0 / 525.0),
        l(-1.0 / 40.0),
    );

    let span = b - a;
    let dir = span.signum();
    let mut h = h_carry.unwrap_or(period / l(100.0)).abs().min(span.abs()) * dir;
    let mut t = a;
    let n = y.len();
    let Work { k, tmp, next } = work;
    let [k1, k2, k3, k4, k5, k6, k7] = k;
    f(t, y, k1);
    loop {
        let remaining = b - t;
        if remaining * dir <= T::zero() {
            break;
        }
        let last = (h.abs() >= remaining.abs()) || (remaining.abs() - h.abs()) <= T::epsilon() * b.abs().max(T::one());
        if last {
            h = remaining;
        }
        *steps += 1;
        if *steps > settings.max_steps {
            return Err(Error::StepLimitExceeded {
                limit: settings.max_steps,
            });
        }
        combine(tmp, y, h, &[(a21, k1)]);
        f(t + c2 * h, tmp, k2);
        combine(tmp, y, h, &[(a31, k1), (a32, k2)]);
        f(t + c3 * h, tmp, k3);
        combine(tmp, y, h, &[(a41, k1), (a42, k2), (a43, k3)]);
        f(t + c4 * h, tmp, k4);
        combine(tmp, y, h, &[(a51, k1), (a52, k2), (a53, k3), (a54, k4)]);
        f(t + c5 * h, tmp, k5);
        combine(tmp, y, h, &[(a61, k1), (a62, k2), (a63, k3), (a64, k4), (a65, k5)]);
        let t_new = if last { b } else { t + h };
        f(t_new, tmp, k6);
        combine(next, y, h, &[(b1, k1), (b3, k3), (b4, k4), (b5, k5), (b6, k6)]);
        f(t_new, next, k7);

        let mut err2 = T::zero();
        for i in 0..n {
            let e = (k1[i] * e1 + k3[i] * e3 + k4[i] * e4 + k5[i] * e5 + k6[i] * e6 + k7[i] * e7) * h;
            let sc = settings.abs_tol + settings.rel_tol * y[i].norm().max(next[i].norm());
            err2 += (e.norm() / sc).powi(2);
        }
        let err = (err2 / T::from_usize_lossy(n.max(1))).sqrt();
        if !err.is_finite() || !finite(next) {
            return Err(Error::NonFinite { t: t_new.as_f64() });
        }
        let factor = if err == T::zero() {
            l(5.0)
        } else {
            (l(0.9) * err.powf(l(-0.2))).max(l(0.2)).min(l(5.0))
        };
        if err <= T::one() {
            t = t_new;
            y.copy_from_slice(next);
            std::mem::swap(k1, k7);
            if !last {
                *h_carry = Some(h.abs());
            }
            h *= factor;
        } else {
            h *= factor.min(T::one());
            if h.abs() <= T::epsilon() * t.abs().max(T::one()) * l(16.0) {
                return Err(Error::NonFinite { t: t.as_f64() });
            }
        }
    }
    Ok(())
}

/// `dy = A·Y` for a row-major `m×k` state.
pub(crate) fn left_mul<T: Real>(a: &ComplexMatrix<T>, y: &[C<T>], dy: &mut [C<T>]) {
    let m = a.rows();
    let k = y.len() / m;
    for i in 0..m {
        let ai = a.row(i);
        for j in 0..k {
            let mut acc = C::new(T::zero(), T::zero());
            for (l, &ail) in ai.iter().enumerate() {
                acc += ail * y[l * k + j];
            }
            dy[i * k + j] = acc;
        }
    }
}

/// `dy = −Y·A` for a row-major `m×m` state.
pub(crate) fn neg_right_mul<T: Real>(a: &ComplexMatrix<T>, y: &[C<T>], dy: &mut [C<T>]) {
    let m = a.rows();
    for i in 0..m {
        for j in 0..m {
            let mut acc = C::new(T::zero(), T::zero());
            for l in 0..m {
                acc += y[i * m + l] * a[(l, j)];
            }
            dy[i * m + j] = -acc;
        }
    }
}

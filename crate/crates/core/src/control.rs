//! Steered two-level Hamiltonian `H_S(t) = ½ b(t)·σ`, its instantaneous
//! eigenbasis, and the adiabatic-frame quantities derived from it.
//!
//! # Gauge
//!
//! Eigenvectors are only defined up to a phase. Two conventions are offered:
//!
//! * **Anchored** (used for frames): one fixed component of each eigenvector,
//!   chosen at `t = 0` as the larger-magnitude one, is kept real and positive.
//!   This gauge is a single-valued function of `b`, so it is smooth along any
//!   path that avoids the poles where the anchored component vanishes, and it
//!   closes on loops. Ties go to the upper component for `|e⟩` and the lower
//!   one for `|g⟩`, which for a cone around `+z` reproduces the textbook
//!   states `|e⟩ = (cos θ/2, e^{iφ} sin θ/2)`, `|g⟩ = (−e^{−iφ} sin θ/2, cos θ/2)`.
//! * **Transported**: passing a previous [`EigenFrame`] rotates each new
//!   eigenvector so that `⟨prev|new⟩` is real and positive. For small steps
//!   this is parallel transport; the diagonal of `ŵ` vanishes and the Berry
//!   phase appears as the holonomy `⟨g(0)|g(T)⟩` instead.
//!
//! A [`LocalGauge`] can additionally multiply the anchored eigenvectors by
//! smooth phases `e^{iβ_g(t)}`, `e^{iβ_e(t)}`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gauge::{hs_norm, PhasePoint, WElements};
use crate::interp::CubicSpline;
use crate::qubit::{inner, norm, scale, Op2, Spinor};
use crate::scalar::{phase, tol, Real};

/// Smallest admissible energy gap.
pub const GAP_FLOOR: f64 = 1e-9;

/// Default central-difference step as a fraction of the path duration.
pub const DEFAULT_FD_FRACTION: f64 = 1e-4;

/// Anchored components whose modulus drops below this are rejected.
const ANCHOR_FLOOR: f64 = 1e-6;

/// Time dependence of the field vector `b(t)`.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum PathKind<T> {
    /// `b(t) = Ω (sin θ cos ωt, sin θ sin ωt, cos θ)`.
    RotatingCone {
        field: T,
        cone_angle: T,
        angular_frequency: T,
    },
    /// Landau–Zener sweep `b(t) = (gap, 0, slope·(t − duration/2))`.
    LinearSweep { slope: T, gap: T },
    /// Cubic-spline interpolation of sampled field vectors.
    Sampled(SampledField<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledField<T> {
    times: Vec<T>,
    fields: Vec<[T; 3]>,
    splines: [CubicSpline<T>; 3],
}

impl<T: Real> SampledField<T> {
    /// Grid times are shifted so that the first sample sits at `t = 0`.
    pub fn new(times: Vec<T>, fields: Vec<[T; 3]>) -> Result<Self> {
        if times.len() != fields.len() {
            return Err(Error::Invalid(format!(
                "sampled path has {} times but {} field vectors",
                times.len(),
                fields.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::Invalid("sampled path needs at least two samples".into()));
        }
        let t0 = times[0];
        let times: Vec<T> = times.into_iter().map(|t| t - t0).collect();
        let component = |k: usize| CubicSpline::new(times.clone(), fields.iter().map(|b| b[k]).collect());
        let splines = [component(0)?, component(1)?, component(2)?];
        Ok(Self { times, fields, splines })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn fields(&self) -> &[[T; 3]] {
        &self.fields
    }

    fn duration(&self) -> T {
        self.times[self.times.len() - 1]
    }
}

/// A control protocol: the field path plus the system part `A` of the
/// system–bath coupling `V = A ⊗ X`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPath<T> {
    pub kind: PathKind<T>,
    pub coupling: Op2<T>,
    pub duration: T,
}

impl<T: Real> ControlPath<T> {
    /// Cone path lasting one full revolution. For `ω = 0` use
    /// [`ControlPath::with_duration`] afterwards.
    pub fn rotating_cone(field: T, cone_angle: T, angular_frequency: T, coupling: Op2<T>) -> Self {
        let duration = if angular_frequency == T::zero() {
            T::one()
        } else {
            T::TAU() / angular_frequency.abs()
        };
        Self {
            kind: PathKind::RotatingCone {
                field,
                cone_angle,
                angular_frequency,
            },
            coupling,
            duration,
        }
    }

    pub fn linear_sweep(slope: T, gap: T, duration: T, coupling: Op2<T>) -> Self {
        Self {
            kind: PathKind::LinearSweep { slope, gap },
            coupling,
            duration,
        }
    }

    pub fn sampled(field: SampledField<T>, coupling: Op2<T>) -> Self {
        let duration = field.duration();
        Self {
            kind: PathKind::Sampled(field),
            coupling,
            duration,
        }
    }

    pub fn with_duration(mut self, duration: T) -> Self {
        self.duration = duration;
        self
    }

    /// Checks the path invariants: finite parameters, positive duration and a
    /// Hermitian coupling operator.
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > T::zero()) || !self.duration.is_finite() {
            return Err(Error::Invalid(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        let finite = match &self.kind {
            PathKind::RotatingCone {
                field,
                cone_angle,
                angular_frequency,
            } => field.is_finite() && cone_angle.is_finite() && angular_frequency.is_finite(),
            PathKind::LinearSweep { slope, gap } => slope.is_finite() && gap.is_finite(),
            PathKind::Sampled(s) => s.fields.iter().flatten().all(|v| v.is_finite()),
        };
        if !finite {
            return Err(Error::Invalid("path parameters must be finite".into()));
        }
        let residual = self.coupling.hermiticity_residual();
        if residual > tol::<T>(1e-14, 1.0) {
            return Err(Error::Invalid(format!(
                "coupling operator is not Hermitian (residual {residual:e})"
            )));
        }
        Ok(())
    }

    /// Field vector `b(t)`.
    pub fn field(&self, t: T) -> [T; 3] {
        match &self.kind {
            PathKind::RotatingCone {
                field,
                cone_angle,
                angular_frequency,
            } => {
                let (s, c) = cone_angle.sin_cos();
                let (sp, cp) = (*angular_frequency * t).sin_cos();
                [*field * s * cp, *field * s * sp, *field * c]
            }
            PathKind::LinearSweep { slope, gap } => [*gap, T::zero(), *slope * (t - self.duration * T::half())],
            PathKind::Sampled(s) => [s.splines[0].eval(t), s.splines[1].eval(t), s.splines[2].eval(t)],
        }
    }

    /// Time derivative `db/dt`.
    pub fn field_rate(&self, t: T) -> [T; 3] {
        match &self.kind {
            PathKind::RotatingCone {
                field,
                cone_angle,
                angular_frequency,
            } => {
                let w = *angular_frequency;
                let s = cone_angle.sin();
                let (sp, cp) = (w * t).sin_cos();
                [-*field * s * w * sp, *field * s * w * cp, T::zero()]
            }
            PathKind::LinearSweep { slope, .. } => [T::zero(), T::zero(), *slope],
            PathKind::Sampled(s) => [
                s.splines[0].derivative(t),
                s.splines[1].derivative(t),
                s.splines[2].derivative(t),
            ],
        }
    }

    pub fn hamiltonian(&self, t: T) -> Op2<T> {
        Op2::field_hamiltonian(self.field(t))
    }

    /// The same protocol run `k` times slower: `b'(k t) = b(t)`.
    pub fn time_stretched(&self, k: T) -> Result<Self> {
        if !(k > T::zero()) {
            return Err(Error::Invalid(format!("stretch factor must be positive, got {k}")));
        }
        let kind = match &self.kind {
            PathKind::RotatingCone {
                field,
                cone_angle,
                angular_frequency,
            } => PathKind::RotatingCone {
                field: *field,
                cone_angle: *cone_angle,
                angular_frequency: *angular_frequency / k,
            },
            PathKind::LinearSweep { slope, gap } => PathKind::LinearSweep {
                slope: *slope / k,
                gap: *gap,
            },
            PathKind::Sampled(s) => PathKind::Sampled(SampledField::new(
                s.times.iter().map(|&t| t * k).collect(),
                s.fields.clone(),
            )?),
        };
        Ok(Self {
            kind,
            coupling: self.coupling,
            duration: self.duration * k,
        })
    }

    fn check_domain(&self, t: T) -> Result<()> {
        let slack = self.duration * T::lit(1e-12);
        if t < -slack || t > self.duration + slack || !t.is_finite() {
            return Err(Error::TimeOutOfDomain {
                t: t.to_f64_lossy(),
                duration: self.duration.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Anchor indices of the reference gauge, fixed by the eigenvectors at `t = 0`.
    pub fn reference_anchors(&self) -> Result<[usize; 2]> {
        Ok(eigensystem(self, T::zero(), None)?.anchors)
    }
}

/// Instantaneous eigenpair of `H_S(t)` with `E_g ≤ E_e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenFrame<T> {
    pub ground: Spinor<T>,
    pub excited: Spinor<T>,
    pub energy_ground: T,
    pub energy_excited: T,
    /// Component kept real-positive for `[ground, excited]`; this is the
    /// phase reference inherited by continued frames.
    pub anchors: [usize; 2],
}

impl<T: Real> EigenFrame<T> {
    pub fn gap(&self) -> T {
        self.energy_excited - self.energy_ground
    }
}

/// Unnormalised eigenvector candidates of `½ b·σ` picked for conditioning,
/// returned normalised as `(|b|, ground, excited)`.
fn raw_eigenvectors<T: Real>(b: [T; 3]) -> (T, Spinor<T>, Spinor<T>) {
    let r = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    let plus = Complex::new(b[0], b[1]);
    let minus = plus.conj();
    let re = |x: T| Complex::new(x, T::zero());

    let e1 = [re(b[2] + r), plus];
    let e2 = [minus, re(r - b[2])];
    let excited = if norm(&e1) >= norm(&e2) { e1 } else { e2 };

    let g1 = [re(b[2] - r), plus];
    let g2 = [minus, re(-r - b[2])];
    let ground = if norm(&g1) >= norm(&g2) { g1 } else { g2 };

    let unit = |v: Spinor<T>| {
        let n = norm(&v);
        scale(&v, Complex::new(T::one() / n, T::zero()))
    };
    (r, unit(ground), unit(excited))
}

fn anchor_phase<T: Real>(v: &Spinor<T>, index: usize, t: T) -> Result<Spinor<T>> {
    let c = v[index];
    let mag = c.norm();
    if mag < T::lit(ANCHOR_FLOOR) {
        return Err(Error::GaugeSingular {
            t: t.to_f64_lossy(),
            index,
            magnitude: mag.to_f64_lossy(),
        });
    }
    Ok(scale(v, c.conj() / mag))
}

fn continue_phase<T: Real>(v: &Spinor<T>, prev: &Spinor<T>) -> Result<Spinor<T>> {
    let z = inner(prev, v);
    let mag = z.norm();
    if mag < T::lit(ANCHOR_FLOOR) {
        return Err(Error::Invalid(
            "gauge continuation step too large: eigenvector overlap vanishes".into(),
        ));
    }
    Ok(scale(v, z.conj() / mag))
}

fn default_anchors<T: Real>(ground: &Spinor<T>, excited: &Spinor<T>) -> [usize; 2] {
    let tie = T::one() - T::lit(1e-12);
    let g = if ground[1].norm() >= ground[0].norm() * tie {
        1
    } else {
        0
    };
    let e = if excited[0].norm() >= excited[1].norm() * tie {
        0
    } else {
        1
    };
    [g, e]
}

fn check_gap<T: Real>(gap: T, t: T) -> Result<()> {
    if !(gap > T::lit(GAP_FLOOR)) {
        return Err(Error::GapCollapse {
            t: t.to_f64_lossy(),
            gap: gap.to_f64_lossy(),
            floor: GAP_FLOOR,
        });
    }
    Ok(())
}

fn eigen_at_field<T: Real>(b: [T; 3], t: T, anchors: Option<[usize; 2]>) -> Result<EigenFrame<T>> {
    let (r, ground, excited) = raw_eigenvectors(b);
    check_gap(r, t)?;
    let anchors = anchors.unwrap_or_else(|| default_anchors(&ground, &excited));
    Ok(EigenFrame {
        ground: anchor_phase(&ground, anchors[0], t)?,
        excited: anchor_phase(&excited, anchors[1], t)?,
        energy_ground: -T::half() * r,
        energy_excited: T::half() * r,
        anchors,
    })
}

/// Orthonormal eigenpair at `t`. Without `prev` the anchored convention is
/// initialised from the larger components; with `prev` each eigenvector is
/// rotated so that its overlap with the previous one is real and positive.
pub fn eigensystem<T: Real>(path: &ControlPath<T>, t: T, prev: Option<&EigenFrame<T>>) -> Result<EigenFrame<T>> {
    path.check_domain(t)?;
    let b = path.field(t);
    match prev {
        None => eigen_at_field(b, t, None),
        Some(p) => {
            let (r, ground, excited) = raw_eigenvectors(b);
            check_gap(r, t)?;
            Ok(EigenFrame {
                ground: continue_phase(&ground, &p.ground)?,
                excited: continue_phase(&excited, &p.excited)?,
                energy_ground: -T::half() * r,
                energy_excited: T::half() * r,
                anchors: p.anchors,
            })
        }
    }
}

/// Smooth gauge of the adiabatic basis: anchored components plus optional
/// extra phases `β_g(t)`, `β_e(t)` (with derivatives) applied on top.
#[derive(Clone)]
pub struct LocalGauge<T> {
    pub anchors: [usize; 2],
    extra: Option<Arc<dyn Fn(T) -> PhasePoint<T> + Send + Sync>>,
}

impl<T: Real> LocalGauge<T> {
    pub fn anchored(anchors: [usize; 2]) -> Self {
        Self { anchors, extra: None }
    }

    /// `phases(t)` returns `β_g, β_e` and their time derivatives.
    pub fn with_phases(mut self, phases: impl Fn(T) -> PhasePoint<T> + Send + Sync + 'static) -> Self {
        self.extra = Some(Arc::new(phases));
        self
    }

    fn phases(&self, t: T) -> PhasePoint<T> {
        self.extra.as_ref().map(|f| f(t)).unwrap_or_default()
    }

    /// Eigenframe at `t` in this gauge. No domain check, so central
    /// differences may step slightly past the path ends.
    fn eigenframe(&self, path: &ControlPath<T>, t: T) -> Result<EigenFrame<T>> {
        let mut ef = eigen_at_field(path.field(t), t, Some(self.anchors))?;
        if self.extra.is_some() {
            let p = self.phases(t);
            ef.ground = scale(&ef.ground, phase(p.lambda_g));
            ef.excited = scale(&ef.excited, phase(p.lambda_e));
        }
        Ok(ef)
    }
}

impl<T> fmt::Debug for LocalGauge<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalGauge")
            .field("anchors", &self.anchors)
            .field("extra_phases", &self.extra.is_some())
            .finish()
    }
}

/// How `ŵ = −i D†Ḋ` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WMethod<T> {
    /// First-order perturbation theory for the off-diagonal element and the
    /// differentiated gauge condition for the diagonal.
    Analytic,
    /// Central differences of gauge-fixed eigenvectors with step `h`.
    CentralDifference(T),
}

impl<T: Real> WMethod<T> {
    pub fn default_difference(path: &ControlPath<T>) -> Self {
        WMethod::CentralDifference(path.duration * T::lit(DEFAULT_FD_FRACTION))
    }
}

/// `ŵ` at `t` in the path's reference (anchored) gauge.
pub fn compute_w<T: Real>(path: &ControlPath<T>, t: T, method: WMethod<T>) -> Result<WElements<T>> {
    let gauge = LocalGauge::anchored(path.reference_anchors()?);
    path.check_domain(t)?;
    let ef = gauge.eigenframe(path, t)?;
    compute_w_in_gauge(path, t, method, &gauge, &ef)
}

fn compute_w_in_gauge<T: Real>(
    path: &ControlPath<T>,
    t: T,
    method: WMethod<T>,
    gauge: &LocalGauge<T>,
    ef: &EigenFrame<T>,
) -> Result<WElements<T>> {
    let i = Complex::<T>::i();
    match method {
        WMethod::Analytic => {
            let gap = ef.gap();
            let dh = Op2::field_hamiltonian(path.field_rate(t));
            let ge = -i * dh.sandwich(&ef.ground, &ef.excited) / gap;

            // Diagonals from the anchored (unphased) vectors: with
            // ġ = |e⟩c + i a|g⟩, keeping g_j real forces a = −Im(e_j c)/g_j.
            let bare = eigen_at_field(path.field(t), t, Some(gauge.anchors))?;
            let [jg, je] = gauge.anchors;
            let c_g = dh.sandwich(&bare.excited, &bare.ground) / (-gap);
            let a_g = -(bare.excited[jg] * c_g).im / bare.ground[jg].re;
            let c_e = dh.sandwich(&bare.ground, &bare.excited) / gap;
            let a_e = -(bare.ground[je] * c_e).im / bare.excited[je].re;

            let extra = gauge.phases(t);
            Ok(WElements {
                gg: a_g + extra.rate_g,
                ee: a_e + extra.rate_e,
                ge,
            })
        }
        WMethod::CentralDifference(h) => {
            if !(h > T::zero()) {
                return Err(Error::Invalid(format!("difference step must be positive, got {h}")));
            }
            let fwd = gauge.eigenframe(path, t + h)?;
            let bwd = gauge.eigenframe(path, t - h)?;
            let two_h = T::two() * h;
            let deriv = |a: &Spinor<T>, b: &Spinor<T>| -> Spinor<T> { [(a[0] - b[0]) / two_h, (a[1] - b[1]) / two_h] };
            let dg = deriv(&fwd.ground, &bwd.ground);
            let de = deriv(&fwd.excited, &bwd.excited);
            let w_gg = -i * inner(&ef.ground, &dg);
            let w_ee = -i * inner(&ef.excited, &de);
            let w_ge = -i * inner(&ef.ground, &de);
            let w_eg = -i * inner(&ef.excited, &dg);
            let residual = w_gg.im.abs().max(w_ee.im.abs()).max((w_ge - w_eg.conj()).norm());
            let limit = tol::<T>(1e-8, 2.0 / 3.0);
            if residual > limit {
                return Err(Error::StepTooCoarse {
                    residual: residual.to_f64_lossy(),
                    limit: limit.to_f64_lossy(),
                });
            }
            Ok(WElements {
                gg: w_gg.re,
                ee: w_ee.re,
                ge: (w_ge + w_eg.conj()) * T::half(),
            })
        }
    }
}

/// Matrix elements of the traceless part of `A`: `m1 = ⟨g|A'|g⟩ = −⟨e|A'|e⟩`
/// and `m2 = ⟨g|A'|e⟩`.
pub fn coupling_elements<T: Real>(coupling: &Op2<T>, frame: &EigenFrame<T>) -> (T, Complex<T>) {
    let a = coupling.traceless();
    let gg = a.sandwich(&frame.ground, &frame.ground).re;
    let ee = a.sandwich(&frame.excited, &frame.excited).re;
    let m1 = (gg - ee) * T::half();
    let m2 = a.sandwich(&frame.ground, &frame.excited);
    (m1, m2)
}

/// `α = ‖ŵ‖_HS / ω01`.
pub fn local_alpha<T: Real>(w: &WElements<T>, omega01: T) -> Result<T> {
    check_gap(omega01, T::nan())?;
    Ok(hs_norm(w) / omega01)
}

/// Snapshot of everything the master equations need at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticFrame<T> {
    pub t: T,
    /// Control field `b(t)`.
    pub field: [T; 3],
    pub omega01: T,
    pub w: WElements<T>,
    pub m1: T,
    pub m2: Complex<T>,
    pub alpha: T,
}

impl<T: Real> AdiabaticFrame<T> {
    /// Frame of a non-steered system (`ŵ = 0`).
    pub fn nonsteered(omega01: T, m1: T, m2: Complex<T>) -> Self {
        Self {
            t: T::zero(),
            field: [T::zero(), T::zero(), omega01],
            omega01,
            w: WElements::zero(),
            m1,
            m2,
            alpha: T::zero(),
        }
    }

    /// Builds a frame from raw elements, computing `α`.
    pub fn from_elements(t: T, omega01: T, w: WElements<T>, m1: T, m2: Complex<T>) -> Result<Self> {
        let alpha = local_alpha(&w, omega01).map_err(|e| match e {
            Error::GapCollapse { gap, floor, .. } => Error::GapCollapse {
                t: t.to_f64_lossy(),
                gap,
                floor,
            },
            other => other,
        })?;
        Ok(Self {
            t,
            field: [T::zero(), T::zero(), omega01],
            omega01,
            w,
            m1,
            m2,
            alpha,
        })
    }

    pub fn at_time(mut self, t: T) -> Self {
        self.t = t;
        self
    }

    pub(crate) fn require_perturbative(&self) -> Result<()> {
        check_gap(self.omega01, self.t)?;
        if !(self.alpha < T::one()) {
            return Err(Error::NonPerturbative {
                t: self.t.to_f64_lossy(),
                alpha: self.alpha.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// Anything that can hand out adiabatic frames at arbitrary times.
pub trait FrameSource<T: Real>: Sync {
    fn frame(&self, t: T) -> Result<AdiabaticFrame<T>>;
}

impl<T: Real, F> FrameSource<T> for F
where
    F: Fn(T) -> Result<AdiabaticFrame<T>> + Sync,
{
    fn frame(&self, t: T) -> Result<AdiabaticFrame<T>> {
        self(t)
    }
}

/// Frames along a [`ControlPath`] in a fixed [`LocalGauge`].
#[derive(Debug, Clone)]
pub struct PathFrames<T> {
    pub path: ControlPath<T>,
    pub method: WMethod<T>,
    pub gauge: LocalGauge<T>,
}

impl<T: Real> PathFrames<T> {
    /// Reference anchored gauge with the analytic `ŵ`.
    pub fn new(path: ControlPath<T>) -> Result<Self> {
        path.validate()?;
        let gauge = LocalGauge::anchored(path.reference_anchors()?);
        Ok(Self {
            path,
            method: WMethod::Analytic,
            gauge,
        })
    }

    pub fn with_method(mut self, method: WMethod<T>) -> Self {
        self.method = method;
        self
    }

    pub fn with_gauge(mut self, gauge: LocalGauge<T>) -> Self {
        self.gauge = gauge;
        self
    }

    pub fn eigenframe(&self, t: T) -> Result<EigenFrame<T>> {
        self.path.check_domain(t)?;
        self.gauge.eigenframe(&self.path, t)
    }

    /// `n ≥ 2` frames on a uniform grid over the whole path.
    pub fn history(&self, n: usize) -> Result<Vec<AdiabaticFrame<T>>> {
        crate::interp::linspace(T::zero(), self.path.duration, n.max(2))
            .into_iter()
            .map(|t| self.frame(t))
            .collect()
    }
}

impl<T: Real> FrameSource<T> for PathFrames<T> {
    fn frame(&self, t: T) -> Result<AdiabaticFrame<T>> {
        let ef = self.eigenframe(t)?;
        let w = compute_w_in_gauge(&self.path, t, self.method, &self.gauge, &ef)?;
        let (m1, m2) = coupling_elements(&self.path.coupling, &ef);
        let omega01 = ef.gap();
        Ok(AdiabaticFrame {
            t,
            field: self.path.field(t),
            omega01,
            w,
            m1,
            m2,
            alpha: local_alpha(&w, omega01)?,
        })
    }
}

/// One frame in the gauge set by `prev` (its anchors), or the path's
/// reference gauge when `prev` is `None`.
pub fn frame_at<T: Real>(
    path: &ControlPath<T>,
    t: T,
    prev: Option<&EigenFrame<T>>,
    method: WMethod<T>,
) -> Result<AdiabaticFrame<T>> {
    let anchors = match prev {
        Some(p) => p.anchors,
        None => path.reference_anchors()?,
    };
    PathFrames {
        path: path.clone(),
        method,
        gauge: LocalGauge::anchored(anchors),
    }
    .frame(t)
}

/// Frame source returning the same frame at every time.
#[derive(Debug, Clone, Copy)]
pub struct StaticFrame<T>(pub AdiabaticFrame<T>);

impl<T: Real> FrameSource<T> for StaticFrame<T> {
    fn frame(&self, t: T) -> Result<AdiabaticFrame<T>> {
        Ok(self.0.at_time(t))
    }
}

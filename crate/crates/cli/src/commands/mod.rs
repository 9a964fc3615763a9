mod analysis;
mod arith;
mod dynamics;
mod ramsey;
mod sparse;

use crate::args::{Command, Global, Mode};
use crate::report::Outcome;
use szlab::Result;

pub struct Ctx {
    pub seed: u64,
    pub mode: Mode,
    pub guard: Option<u64>,
}

/// Run `$f::<S>(args…)` with S chosen by the arithmetic mode.
macro_rules! by_mode {
    ($ctx:expr, $f:ident($($a:expr),*)) => {
        match $ctx.mode {
            $crate::args::Mode::Rational => $f::<num_rational::BigRational>($($a),*),
            $crate::args::Mode::Float => $f::<f64>($($a),*),
        }
    };
}
pub(crate) use by_mode;

/// Guards only exist for the exhaustive enumerators.
pub fn resolve_guard(cmd: &Command, global: &Global) -> Option<u64> {
    let default = match cmd {
        Command::Vdw(_) => szlab::ramsey::DEFAULT_VDW_GUARD,
        Command::HalesJewett(_) => szlab::ramsey::DEFAULT_CUBE_GUARD,
        Command::Schur(_) => ramsey::DEFAULT_SCHUR_GUARD,
        Command::LinearForms(_) => szlab::relative::DEFAULT_OCTAHEDRAL_GUARD as u64,
        _ => return global.guard,
    };
    Some(global.guard.unwrap_or(default))
}

pub fn execute(cmd: &Command, ctx: &Ctx) -> Result<Outcome> {
    match cmd {
        Command::CountAps(a) => arith::count_aps(a, ctx),
        Command::Behrend(a) => arith::behrend(a),
        Command::Bohr(a) => arith::bohr(a),
        Command::Qrec(a) => arith::qrec(a),
        Command::Roth(a) => arith::roth(a, ctx),
        Command::Vdw(a) => ramsey::vdw(a, ctx),
        Command::Schur(a) => ramsey::schur(a, ctx),
        Command::HalesJewett(a) => ramsey::hales_jewett(a, ctx),
        Command::Ergodic(a) => dynamics::ergodic(a, ctx),
        Command::Recurrence(a) => dynamics::recurrence(a, ctx),
        Command::Boxnorm(a) => analysis::boxnorm(a, ctx),
        Command::Lambda(a) => analysis::lambda(a, ctx),
        Command::Regularize(a) => analysis::regularize(a, ctx),
        Command::TriangleRemoval(a) => analysis::triangle_removal(a, ctx),
        Command::Gnp(a) => sparse::gnp(a, ctx),
        Command::LinearForms(a) => sparse::linear_forms(a, ctx),
        Command::Structure(a) => sparse::structure(a, ctx),
        Command::RelativeRemoval(a) => sparse::relative_removal(a, ctx),
    }
}

/// Exact equality in rational mode, relative 1e-9 agreement in float mode.
pub fn close<S: szlab::Scalar>(a: &S, b: &S) -> bool {
    if S::EXACT {
        a == b
    } else {
        let (x, y) = (a.to_f64_lossy(), b.to_f64_lossy());
        (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0)
    }
}

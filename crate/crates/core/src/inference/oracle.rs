//! Access to the statistical measure during belief computation: either the
//! values every feasible measure agrees on (point mode), or one concrete
//! feasible measure (sampling).

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use super::InferError;
use crate::crossentropy::to_f64;
use crate::lp::Q;
use crate::statistics::{Event, StatModel};
use crate::syntax::format_prob;

/// A probability, exact when every step that produced it was.
#[derive(Debug, Clone, PartialEq)]
pub struct Scalar {
    pub value: f64,
    pub exact: Option<Q>,
}

impl Scalar {
    pub fn exact(q: Q) -> Scalar {
        Scalar {
            value: to_f64(&q),
            exact: Some(q),
        }
    }

    pub fn approx(value: f64) -> Scalar {
        Scalar { value, exact: None }
    }

    pub fn zero() -> Scalar {
        Scalar::exact(Q::zero())
    }

    pub fn one() -> Scalar {
        Scalar::exact(Q::one())
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(q) => q.is_zero(),
            None => self.value == 0.0,
        }
    }

    pub fn div(&self, o: &Scalar) -> Scalar {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) if !b.is_zero() => Scalar::exact(a / b),
            _ => Scalar::approx(self.value / o.value),
        }
    }

    /// Exact rational (decimal when finite) or a 12-digit decimal.
    pub fn render(&self) -> String {
        match &self.exact {
            Some(q) => format_prob(q),
            None => format!("{:.12}", self.value),
        }
    }

    pub fn decimal(&self) -> String {
        format!("{:.12}", self.value)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

macro_rules! scalar_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                match (&self.exact, &o.exact) {
                    (Some(a), Some(b)) => Scalar::exact(a $op b),
                    _ => Scalar::approx(self.value $op o.value),
                }
            }
        }
    };
}
scalar_op!(Add, add, +);
scalar_op!(Sub, sub, -);
scalar_op!(Mul, mul, *);

/// What the belief computation may ask of the statistical measure.
pub trait MeasureOracle {
    fn model(&self) -> &StatModel;

    /// `mu(e)`; an error when it is not determined.
    fn prob(&self, e: &Event, what: &str) -> Result<Scalar, InferError>;

    /// `mu(phi | psi)`; `None` when `psi` is null.
    fn cond(&self, phi: &Event, psi: &Event, what: &str) -> Result<Option<Scalar>, InferError>;

    /// Whether `mu(e) = 0` (for every feasible measure, in point mode).
    fn is_null(&self, e: &Event) -> Result<bool, InferError>;
}

type CondKey = (Event, Event);

/// Point mode: values pinned by the linear program.
pub struct LpOracle<'m> {
    model: &'m StatModel,
    cache: RefCell<HashMap<CondKey, (Q, Q, bool)>>,
}

impl<'m> LpOracle<'m> {
    pub fn new(model: &'m StatModel) -> Self {
        LpOracle {
            model,
            cache: RefCell::new(HashMap::new()),
        }
    }

    fn bounds(&self, phi: &Event, psi: &Event) -> Result<(Q, Q, bool), InferError> {
        let key = (phi.clone(), psi.clone());
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let iv = self.model.conditional_interval(phi, psi)?;
        let v = (iv.lo, iv.hi, iv.conditioning_possible);
        self.cache.borrow_mut().insert(key, v.clone());
        Ok(v)
    }
}

fn not_unique(what: &str, lo: &Q, hi: &Q) -> InferError {
    InferError::NotUnique(format!(
        "the statistical sentences do not determine {what} (anywhere in [{}, {}])",
        format_prob(lo),
        format_prob(hi)
    ))
}

impl MeasureOracle for LpOracle<'_> {
    fn model(&self) -> &StatModel {
        self.model
    }

    fn prob(&self, e: &Event, what: &str) -> Result<Scalar, InferError> {
        let full = self.model.full(e.level);
        let (lo, hi, _) = self.bounds(e, &full)?;
        if lo != hi {
            return Err(not_unique(what, &lo, &hi));
        }
        Ok(Scalar::exact(lo))
    }

    fn cond(&self, phi: &Event, psi: &Event, what: &str) -> Result<Option<Scalar>, InferError> {
        let (lo, hi, possible) = self.bounds(phi, psi)?;
        if !possible {
            return Ok(None);
        }
        if lo != hi {
            return Err(not_unique(what, &lo, &hi));
        }
        Ok(Some(Scalar::exact(lo)))
    }

    fn is_null(&self, e: &Event) -> Result<bool, InferError> {
        if e.is_empty() {
            return Ok(true);
        }
        let full = self.model.full(e.level);
        let (_, hi, _) = self.bounds(e, &full)?;
        Ok(hi.is_zero())
    }
}

/// One concrete feasible measure, given by its LP column vector.
pub struct SampleOracle<'m> {
    model: &'m StatModel,
    x: Vec<Q>,
}

impl<'m> SampleOracle<'m> {
    pub fn new(model: &'m StatModel, x: Vec<Q>) -> Self {
        SampleOracle { model, x }
    }
}

impl MeasureOracle for SampleOracle<'_> {
    fn model(&self) -> &StatModel {
        self.model
    }

    fn prob(&self, e: &Event, _: &str) -> Result<Scalar, InferError> {
        Ok(Scalar::exact(self.model.mass(&self.x, e)))
    }

    fn cond(&self, phi: &Event, psi: &Event, _: &str) -> Result<Option<Scalar>, InferError> {
        let den = self.model.mass(&self.x, psi);
        if den.is_zero() {
            return Ok(None);
        }
        let num = self.model.mass(&self.x, &phi.intersection(psi));
        Ok(Some(Scalar::exact(num / den)))
    }

    fn is_null(&self, e: &Event) -> Result<bool, InferError> {
        Ok(self.model.mass(&self.x, e).is_zero())
    }
}

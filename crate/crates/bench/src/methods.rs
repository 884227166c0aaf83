//! The eight compared methods and a factory turning a name plus parameter
//! block into a driver.

use std::fmt;

use anyhow::Result;
use relaxproj::operators::{DrStepper, GcarpaStepper, GrapParams, GrapStepper, MapStepper, SolverParams, Step, Stepper};
use relaxproj::schedules::{NsDrStepper, NsGcarpaStepper, ScheduleLaw};
use relaxproj::ConvexSet;
use serde::{Deserialize, Serialize};

use crate::config::MethodParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dr,
    NsDr,
    Map,
    Grap,
    Carpa,
    NsCarpa,
    Gcarpa,
    NsGcarpa,
}

impl Method {
    /// Column order of the published tables.
    pub const ALL: [Method; 8] =
        [Method::Dr, Method::NsDr, Method::Map, Method::Grap, Method::Carpa, Method::NsCarpa, Method::Gcarpa, Method::NsGcarpa];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dr => "dr",
            Method::NsDr => "ns-dr",
            Method::Map => "map",
            Method::Grap => "grap",
            Method::Carpa => "carpa",
            Method::NsCarpa => "ns-carpa",
            Method::Gcarpa => "gcarpa",
            Method::NsGcarpa => "ns-gcarpa",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| anyhow::anyhow!("unknown method {s:?}"))
    }

    pub fn is_non_stationary(self) -> bool {
        matches!(self, Method::NsDr | Method::NsCarpa | Method::NsGcarpa)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A constructed method, kept concrete so schedule histories stay
/// inspectable after a run.
pub enum Driver<'a> {
    Dr(DrStepper<'a>),
    NsDr(NsDrStepper<'a>),
    Map(MapStepper<'a>),
    Grap(GrapStepper<'a>),
    Gcarpa(GcarpaStepper<'a>),
    NsGcarpa(NsGcarpaStepper<'a>),
}

impl Driver<'_> {
    /// Worst violation of the increment bound over the parameter history
    /// (non-positive when it holds); `None` for methods without a schedule.
    pub fn increment_excess(&self) -> Option<f64> {
        match self {
            Driver::NsGcarpa(s) => Some(s.worst_increment_excess()),
            _ => None,
        }
    }

    pub fn schedule_history(&self) -> Option<&[[f64; 3]]> {
        match self {
            Driver::NsGcarpa(s) => Some(&s.history),
            _ => None,
        }
    }

    fn inner(&mut self) -> &mut dyn Stepper {
        match self {
            Driver::Dr(s) => s,
            Driver::NsDr(s) => s,
            Driver::Map(s) => s,
            Driver::Grap(s) => s,
            Driver::Gcarpa(s) => s,
            Driver::NsGcarpa(s) => s,
        }
    }

    fn inner_ref(&self) -> &dyn Stepper {
        match self {
            Driver::Dr(s) => s,
            Driver::NsDr(s) => s,
            Driver::Map(s) => s,
            Driver::Grap(s) => s,
            Driver::Gcarpa(s) => s,
            Driver::NsGcarpa(s) => s,
        }
    }
}

impl Stepper for Driver<'_> {
    fn set_x(&self) -> &ConvexSet {
        self.inner_ref().set_x()
    }
    fn set_y(&self) -> &ConvexSet {
        self.inner_ref().set_y()
    }
    fn step(&mut self, z: &[f64]) -> relaxproj::Result<Step> {
        self.inner().step(z)
    }
}

pub fn make_stepper<'a>(method: Method, params: &MethodParams, x: &'a ConvexSet, y: &'a ConvexSet) -> Result<Driver<'a>> {
    let iv = params.intervals.to_intervals();
    Ok(match method {
        Method::Dr => Driver::Dr(DrStepper { x, y }),
        Method::NsDr => Driver::NsDr(NsDrStepper::new(x, y, params.ns_dr.to_law())),
        Method::Map => Driver::Map(MapStepper { x, y }),
        Method::Grap => Driver::Grap(GrapStepper { x, y, params: GrapParams::new(params.grap.alpha, params.grap.beta)? }),
        Method::Carpa => Driver::Gcarpa(GcarpaStepper { x, y, params: SolverParams::carpa(params.carpa_gamma)? }),
        Method::NsCarpa => Driver::NsGcarpa(NsGcarpaStepper::new(x, y, iv.gamma_only(), ScheduleLaw::Multiplicative)?),
        Method::Gcarpa => {
            let [g, th, et] = params.gcarpa;
            Driver::Gcarpa(GcarpaStepper { x, y, params: SolverParams::new(1.0, g, th, et)? })
        }
        Method::NsGcarpa => Driver::NsGcarpa(NsGcarpaStepper::new(x, y, iv, ScheduleLaw::Multiplicative)?),
    })
}

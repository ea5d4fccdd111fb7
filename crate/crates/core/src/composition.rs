//! Daily activity compositions and the constraint machinery around them.
//!
//! A day is split into four activities — sleep, sedentary behaviour, light
//! physical activity (LPA) and moderate-to-vigorous physical activity
//! (MVPA) — whose durations must total 1440 minutes. Durations carry only
//! relative information, so they are mapped to unconstrained coordinates
//! with the isometric log-ratio (ilr) transform before any regression
//! model is evaluated. This module holds the composition type, the closure
//! repair that restores the 1440-minute total, the ilr transform, bound
//! violation measures, and the built-in catalogs of day structures and
//! week mixtures.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Total minutes in one day; every composition is closed to this sum.
pub const MINUTES_PER_DAY: f64 = 1440.0;

/// Number of activity parts in a composition.
pub const ACTIVITY_COUNT: usize = 4;

/// Absolute tolerance on the 1440-minute sum invariant.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Floor applied to candidate components before closure so that search
/// operators producing non-positive values keep the transform defined.
/// The MVPA lower bound of 1 minute makes the floor inert at feasibility.
pub const POSITIVITY_FLOOR: f64 = 1e-6;

/// One day of activity durations in minutes: (sleep, sedentary, LPA, MVPA).
///
/// Values are strictly positive and sum to 1440 within [`SUM_TOLERANCE`];
/// both invariants are established by [`ActivityComposition::closure`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActivityComposition([f64; ACTIVITY_COUNT]);

impl ActivityComposition {
    /// Rescales a raw positive 4-vector so its parts sum to 1440 minutes,
    /// preserving all pairwise ratios.
    pub fn closure(raw: [f64; ACTIVITY_COUNT]) -> Result<Self> {
        for &v in &raw {
            if !(v > 0.0) {
                return Err(Error::NonPositiveComponent(v));
            }
        }
        let total: f64 = raw.iter().sum();
        let scale = MINUTES_PER_DAY / total;
        Ok(Self(raw.map(|v| v * scale)))
    }

    /// Closure with the [`POSITIVITY_FLOOR`] applied first. This is the
    /// repair used on search candidates, which may go non-positive after
    /// mutation arithmetic; it cannot fail.
    pub fn closure_floored(raw: [f64; ACTIVITY_COUNT]) -> Self {
        let floored = raw.map(|v| if v.is_finite() { v.max(POSITIVITY_FLOOR) } else { POSITIVITY_FLOOR });
        Self::closure(floored).expect("floored components are positive")
    }

    pub fn sleep(&self) -> f64 {
        self.0[0]
    }

    pub fn sedentary(&self) -> f64 {
        self.0[1]
    }

    pub fn lpa(&self) -> f64 {
        self.0[2]
    }

    pub fn mvpa(&self) -> f64 {
        self.0[3]
    }

    /// The four durations in minutes, in (sleep, sedentary, LPA, MVPA) order.
    pub fn minutes(&self) -> [f64; ACTIVITY_COUNT] {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for ActivityComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:.1}, {:.1}, {:.1}, {:.1})",
            self.0[0], self.0[1], self.0[2], self.0[3]
        )
    }
}

/// Unconstrained ilr coordinates of a composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlrCoordinates {
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
}

impl IlrCoordinates {
    pub fn as_array(&self) -> [f64; 3] {
        [self.z1, self.z2, self.z3]
    }
}

/// Isometric log-ratio transform of a composition:
///
/// ```text
/// z1 = sqrt(3/4) ln(x1 / cbrt(x2 x3 x4))
/// z2 = sqrt(2/3) ln(x2 / sqrt(x3 x4))
/// z3 = sqrt(1/2) ln(x3 / x4)
/// ```
///
/// Positivity is guaranteed by the composition type, so this cannot fail.
/// The transform depends only on ratios, hence is invariant under closure.
pub fn ilr(x: &ActivityComposition) -> IlrCoordinates {
    let [x1, x2, x3, x4] = x.minutes();
    ilr_parts(x1, x2, x3, x4)
}

pub(crate) fn ilr_parts(x1: f64, x2: f64, x3: f64, x4: f64) -> IlrCoordinates {
    let (l1, l2, l3, l4) = (x1.ln(), x2.ln(), x3.ln(), x4.ln());
    IlrCoordinates {
        z1: (0.75f64).sqrt() * (l1 - (l2 + l3 + l4) / 3.0),
        z2: (2.0f64 / 3.0).sqrt() * (l2 - (l3 + l4) / 2.0),
        z3: (0.5f64).sqrt() * (l3 - l4),
    }
}

/// The six built-in day structures, in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DayType {
    /// STD — Studious day.
    Studious,
    /// SPD — Sporty day.
    Sporty,
    /// ASJD — After-school job day.
    AfterSchoolJob,
    /// SPWD — Sporty weekend day.
    SportyWeekend,
    /// STWD — Studious/screen weekend day.
    StudiousWeekend,
    /// WWD — Working weekend day.
    WorkingWeekend,
}

impl DayType {
    pub const ALL: [DayType; 6] = [
        DayType::Studious,
        DayType::Sporty,
        DayType::AfterSchoolJob,
        DayType::SportyWeekend,
        DayType::StudiousWeekend,
        DayType::WorkingWeekend,
    ];

    /// Short catalog code (STD, SPD, ASJD, SPWD, STWD, WWD).
    pub fn code(&self) -> &'static str {
        match self {
            DayType::Studious => "STD",
            DayType::Sporty => "SPD",
            DayType::AfterSchoolJob => "ASJD",
            DayType::SportyWeekend => "SPWD",
            DayType::StudiousWeekend => "STWD",
            DayType::WorkingWeekend => "WWD",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DayType::Studious => "Studious day",
            DayType::Sporty => "Sporty day",
            DayType::AfterSchoolJob => "After-school job day",
            DayType::SportyWeekend => "Sporty weekend day",
            DayType::StudiousWeekend => "Studious/screen weekend day",
            DayType::WorkingWeekend => "Working weekend day",
        }
    }
}

impl fmt::Display for DayType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for DayType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "STD" => Ok(DayType::Studious),
            "SPD" => Ok(DayType::Sporty),
            "ASJD" => Ok(DayType::AfterSchoolJob),
            "SPWD" => Ok(DayType::SportyWeekend),
            "STWD" => Ok(DayType::StudiousWeekend),
            "WWD" => Ok(DayType::WorkingWeekend),
            _ => Err(Error::UnknownDayStructure(s.to_string())),
        }
    }
}

impl TryFrom<String> for DayType {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DayType> for String {
    fn from(d: DayType) -> String {
        d.code().to_string()
    }
}

/// Per-activity lower and upper bounds (minutes) for one day structure.
#[derive(Debug, Clone, Serialize)]
pub struct DayStructure {
    pub day: DayType,
    pub lower: [f64; ACTIVITY_COUNT],
    pub upper: [f64; ACTIVITY_COUNT],
}

// Catalog rows in (sleep, sedentary, LPA, MVPA) order.
static DAY_CATALOG: [DayStructure; 6] = [
    DayStructure {
        day: DayType::Studious,
        lower: [360.0, 690.0, 150.0, 1.0],
        upper: [720.0, 900.0, 480.0, 210.0],
    },
    DayStructure {
        day: DayType::Sporty,
        lower: [360.0, 480.0, 210.0, 61.0],
        upper: [720.0, 900.0, 480.0, 210.0],
    },
    DayStructure {
        day: DayType::AfterSchoolJob,
        lower: [360.0, 480.0, 220.0, 1.0],
        upper: [720.0, 900.0, 480.0, 210.0],
    },
    DayStructure {
        day: DayType::SportyWeekend,
        lower: [420.0, 210.0, 210.0, 61.0],
        upper: [720.0, 900.0, 480.0, 210.0],
    },
    DayStructure {
        day: DayType::StudiousWeekend,
        lower: [420.0, 270.0, 150.0, 1.0],
        upper: [720.0, 900.0, 480.0, 210.0],
    },
    DayStructure {
        day: DayType::WorkingWeekend,
        lower: [360.0, 210.0, 390.0, 1.0],
        upper: [720.0, 900.0, 480.0, 210.0],
    },
];

/// Looks up the bound catalog entry for a day structure.
pub fn day_structure(day: DayType) -> &'static DayStructure {
    &DAY_CATALOG[day as usize]
}

/// Total excess over the per-activity bounds:
/// `u(x) = sum_i max(0, x_i - upper_i, lower_i - x_i)`.
///
/// Zero exactly when every activity lies within its bounds.
pub fn bound_violation(x: &ActivityComposition, d: &DayStructure) -> f64 {
    let m = x.minutes();
    let mut u = 0.0;
    for i in 0..ACTIVITY_COUNT {
        u += (m[i] - d.upper[i]).max(d.lower[i] - m[i]).max(0.0);
    }
    u
}

/// Seven scheduled days, each pairing a day structure with a composition.
#[derive(Debug, Clone)]
pub struct WeekPlan {
    days: Vec<(DayType, ActivityComposition)>,
}

impl WeekPlan {
    pub fn new(days: Vec<(DayType, ActivityComposition)>) -> Result<Self> {
        if days.len() != 7 {
            return Err(Error::WeekLength(days.len()));
        }
        Ok(Self { days })
    }

    pub fn days(&self) -> &[(DayType, ActivityComposition)] {
        &self.days
    }
}

/// Sum of per-day bound violations over the week.
pub fn week_violation(w: &WeekPlan) -> f64 {
    w.days()
        .iter()
        .map(|(day, x)| bound_violation(x, day_structure(*day)))
        .sum()
}

/// A one-week instance: how many of each day structure the week contains.
#[derive(Debug, Clone, Serialize)]
pub struct WeekMixture {
    pub index: u8,
    counts: [u8; 6],
}

impl WeekMixture {
    pub fn count(&self, day: DayType) -> u8 {
        self.counts[day as usize]
    }

    /// The seven day structures in canonical order: catalog order expanded
    /// by count. This fixes the layout of week decision vectors.
    pub fn day_types(&self) -> Vec<DayType> {
        let mut days = Vec::with_capacity(7);
        for (i, &n) in self.counts.iter().enumerate() {
            for _ in 0..n {
                days.push(DayType::ALL[i]);
            }
        }
        days
    }
}

// Counts in catalog order (STD, SPD, ASJD, SPWD, STWD, WWD).
static WEEK_CATALOG: [WeekMixture; 6] = [
    WeekMixture { index: 1, counts: [3, 1, 0, 1, 1, 1] },
    WeekMixture { index: 2, counts: [3, 0, 2, 0, 1, 1] },
    WeekMixture { index: 3, counts: [3, 2, 0, 0, 1, 1] },
    WeekMixture { index: 4, counts: [2, 2, 1, 0, 2, 0] },
    WeekMixture { index: 5, counts: [2, 2, 0, 1, 0, 2] },
    WeekMixture { index: 6, counts: [2, 2, 1, 1, 1, 0] },
];

/// Looks up a week mixture by its 1-based catalog index.
pub fn week_mixture(index: u8) -> Result<&'static WeekMixture> {
    if (1..=6).contains(&index) {
        Ok(&WEEK_CATALOG[(index - 1) as usize])
    } else {
        Err(Error::UnknownWeekMixture(index))
    }
}

/// All six mixtures in catalog order.
pub fn week_mixtures() -> &'static [WeekMixture; 6] {
    &WEEK_CATALOG
}

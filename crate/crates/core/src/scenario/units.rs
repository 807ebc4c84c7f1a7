//! Dimensional quantities written as `"<value> <unit>"` strings.

use std::fmt;
use std::marker::PhantomData;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Seconds per year.
pub const YEAR: f64 = 3.1536e7;

pub trait UnitKind {
    const NAME: &'static str;
    /// Unit written on output; its factor is 1.
    const SI: &'static str;
    const UNITS: &'static [(&'static str, f64)];
}

macro_rules! unit_kind {
    ($name:ident, $label:expr, $si:expr, [$(($u:expr, $f:expr)),* $(,)?]) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub struct $name;
        impl UnitKind for $name {
            const NAME: &'static str = $label;
            const SI: &'static str = $si;
            const UNITS: &'static [(&'static str, f64)] = &[($si, 1.0), $(($u, $f)),*];
        }
    };
}

unit_kind!(Time, "time", "s", [("year", YEAR), ("years", YEAR), ("yr", YEAR), ("day", 86400.0), ("days", 86400.0)]);
unit_kind!(Length, "length", "m", [("km", 1e3)]);
unit_kind!(Pressure, "pressure", "Pa", [("kPa", 1e3), ("MPa", 1e6), ("bar", 1e5)]);
unit_kind!(Velocity, "velocity", "m/s", [("m/year", 1.0 / YEAR), ("m/yr", 1.0 / YEAR)]);
unit_kind!(Permeability, "permeability", "m2", []);
unit_kind!(Viscosity, "viscosity", "Pa.s", []);
unit_kind!(Diffusivity, "diffusivity", "m2/s", []);
unit_kind!(MolarMass, "molar mass", "kg/mol", [("g/mol", 1e-3)]);
unit_kind!(Density, "density", "kg/m3", []);
unit_kind!(MassRate, "mass source", "kg/m3/s", [("kg/m3/year", 1.0 / YEAR)]);
unit_kind!(HenryConstant, "Henry constant", "mol/Pa/m3", []);
unit_kind!(Temperature, "temperature", "K", []);
unit_kind!(GasConstant, "gas constant", "J/K/mol", []);
unit_kind!(Acceleration, "acceleration", "m/s2", []);

/// A value of kind `U`, stored in SI units.
pub struct Quantity<U> {
    si: f64,
    _unit: PhantomData<U>,
}

impl<U> Clone for Quantity<U> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<U> Copy for Quantity<U> {}
impl<U> PartialEq for Quantity<U> {
    fn eq(&self, other: &Self) -> bool {
        self.si == other.si
    }
}

impl<U: UnitKind> fmt::Debug for Quantity<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<U: UnitKind> fmt::Display for Quantity<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} {}", self.si, U::SI)
    }
}

impl<U: UnitKind> Quantity<U> {
    pub fn si(si: f64) -> Self {
        Quantity {
            si,
            _unit: PhantomData,
        }
    }

    pub fn value(self) -> f64 {
        self.si
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (num, unit) = text
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Config(format!("{} `{text}` needs a unit, e.g. `1 {}`", U::NAME, U::SI)))?;
        let value: f64 = num
            .parse()
            .map_err(|_| Error::Config(format!("bad number `{num}` in {} `{text}`", U::NAME)))?;
        let unit = unit.trim();
        let factor = U::UNITS
            .iter()
            .find(|(u, _)| *u == unit)
            .map(|(_, f)| *f)
            .ok_or_else(|| {
                let known: Vec<&str> = U::UNITS.iter().map(|(u, _)| *u).collect();
                Error::Config(format!("unknown {} unit `{unit}` (expected one of {})", U::NAME, known.join(", ")))
            })?;
        if !value.is_finite() {
            return Err(Error::Config(format!("{} `{text}` is not finite", U::NAME)));
        }
        Ok(Self::si(value * factor))
    }
}

impl<U: UnitKind> Serialize for Quantity<U> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de, U: UnitKind> Deserialize<'de> for Quantity<U> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Quantity::parse(&text).map_err(de::Error::custom)
    }
}

//! Quantities with units, converted to the SI units used internally.

use std::fmt;

/// Physical dimension a config field is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// K
    Temperature,
    /// W
    Power,
    /// EUR/J
    Price,
    /// Dimensionless (J/J, MWh/MWh, efficiencies).
    Ratio,
    /// m³
    Volume,
    /// m
    Length,
    /// W/(m·K)
    Conductivity,
    /// kg/m³
    Density,
    /// J/(kg·K)
    SpecificHeat,
    /// s
    Duration,
}

impl Dimension {
    /// Dimension of a config field, looked up by its key.
    pub fn of_field(key: &str) -> Option<Self> {
        Some(match key {
            "levels" | "temperature" | "ambient" => Self::Temperature,
            "capacity" | "max" | "demand" | "fixed" | "max_charge" | "max_discharge" => Self::Power,
            "price" => Self::Price,
            "exergy" | "efficiency" | "quality" | "pump_fraction" => Self::Ratio,
            "volume" | "initial_volumes" => Self::Volume,
            "radius" | "insulation_thickness" | "nominal_fill_height" => Self::Length,
            "insulation_conductivity" => Self::Conductivity,
            "density" => Self::Density,
            "heat_capacity" => Self::SpecificHeat,
            "step" => Self::Duration,
            _ => return None,
        })
    }

    pub fn si_unit(self) -> &'static str {
        match self {
            Self::Temperature => "K",
            Self::Power => "W",
            Self::Price => "EUR/J",
            Self::Ratio => "1",
            Self::Volume => "m3",
            Self::Length => "m",
            Self::Conductivity => "W/(m K)",
            Self::Density => "kg/m3",
            Self::SpecificHeat => "J/(kg K)",
            Self::Duration => "s",
        }
    }

    /// `(factor, divisor, offset)` such that `si = value·factor/divisor + offset`.
    fn conversion(self, unit: &str) -> Option<(f64, f64, f64)> {
        let u = unit.trim();
        let linear = |f: f64| Some((f, 1.0, 0.0));
        let per = |d: f64| Some((1.0, d, 0.0));
        match self {
            Self::Temperature => match u {
                "K" => linear(1.0),
                "degC" | "°C" | "C" => Some((1.0, 1.0, 273.15)),
                _ => None,
            },
            Self::Power => match u {
                "W" => linear(1.0),
                "kW" => linear(1e3),
                "MW" => linear(1e6),
                _ => None,
            },
            Self::Price => match u {
                "EUR/J" => linear(1.0),
                "EUR/kWh" => per(3.6e6),
                "EUR/MWh" => per(3.6e9),
                "ct/kWh" => per(3.6e8),
                _ => None,
            },
            Self::Ratio => match u {
                "1" | "J/J" | "kWh/kWh" | "MWh/MWh" => linear(1.0),
                "%" => per(100.0),
                _ => None,
            },
            Self::Volume => match u {
                "m3" | "m³" => linear(1.0),
                "L" | "l" => per(1e3),
                _ => None,
            },
            Self::Length => match u {
                "m" => linear(1.0),
                "cm" => per(1e2),
                "mm" => per(1e3),
                _ => None,
            },
            Self::Conductivity => match u {
                "W/(m K)" | "W/mK" | "W/(m*K)" => linear(1.0),
                _ => None,
            },
            Self::Density => match u {
                "kg/m3" | "kg/m³" => linear(1.0),
                _ => None,
            },
            Self::SpecificHeat => match u {
                "J/(kg K)" | "J/kgK" => linear(1.0),
                "kJ/(kg K)" | "kJ/kgK" => linear(1e3),
                _ => None,
            },
            Self::Duration => match u {
                "s" => linear(1.0),
                "min" => linear(60.0),
                "h" => linear(3600.0),
                _ => None,
            },
        }
    }

    /// Converter from `unit` to SI, or `None` when the unit does not
    /// measure this dimension.
    pub fn converter(self, unit: &str) -> Option<impl Fn(f64) -> f64> {
        let (factor, divisor, offset) = self.conversion(unit)?;
        Some(move |v: f64| v * factor / divisor + offset)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Temperature => "temperature",
            Self::Power => "power",
            Self::Price => "price",
            Self::Ratio => "ratio",
            Self::Volume => "volume",
            Self::Length => "length",
            Self::Conductivity => "conductivity",
            Self::Density => "density",
            Self::SpecificHeat => "specific heat",
            Self::Duration => "duration",
        };
        f.write_str(name)
    }
}

/// Split `"45 degC"` into its number and unit.
pub fn split_quantity(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    let end = text.find(char::is_whitespace).unwrap_or(text.len());
    let value: f64 = text[..end].parse().ok()?;
    let unit = text[end..].trim();
    (!unit.is_empty()).then_some((value, unit))
}

/// Parse a quantity string into SI units of `dim`.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, String> {
    let (value, unit) = split_quantity(text).ok_or_else(|| format!("expected `<number> <unit>`, got {text:?}"))?;
    let convert = dim.converter(unit).ok_or_else(|| format!("unit {unit:?} does not measure {dim}"))?;
    Ok(convert(value))
}

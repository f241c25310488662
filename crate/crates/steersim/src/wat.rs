//! Wireless access technologies and per-WAT containers.

use serde::{Deserialize, Serialize};
use std::fmt;

/// One of the three wireless access technologies in the scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Wat {
    #[serde(rename = "5g")]
    FiveG,
    #[serde(rename = "wifi")]
    WiFi,
    #[serde(rename = "lifi")]
    LiFi,
}

impl Wat {
    pub const ALL: [Wat; 3] = [Wat::FiveG, Wat::WiFi, Wat::LiFi];

    /// Short lowercase label used in CSV traces and config keys.
    pub fn label(self) -> &'static str {
        match self {
            Wat::FiveG => "5g",
            Wat::WiFi => "wifi",
            Wat::LiFi => "lifi",
        }
    }

    pub fn from_label(s: &str) -> Option<Wat> {
        match s {
            "5g" => Some(Wat::FiveG),
            "wifi" => Some(Wat::WiFi),
            "lifi" => Some(Wat::LiFi),
            _ => None,
        }
    }
}

impl fmt::Display for Wat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Wat::FiveG => "5G",
            Wat::WiFi => "Wi-Fi",
            Wat::LiFi => "LiFi",
        };
        write!(f, "{name}")
    }
}

/// A map that holds exactly one value per WAT. Total by construction, so
/// lookups never fail and iteration order is fixed (5G, Wi-Fi, LiFi).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerWat<T> {
    #[serde(rename = "5g")]
    pub five_g: T,
    pub wifi: T,
    pub lifi: T,
}

impl<T> PerWat<T> {
    pub fn new(five_g: T, wifi: T, lifi: T) -> Self {
        Self { five_g, wifi, lifi }
    }

    /// Build a map by evaluating `f` once per WAT.
    pub fn from_fn(mut f: impl FnMut(Wat) -> T) -> Self {
        Self {
            five_g: f(Wat::FiveG),
            wifi: f(Wat::WiFi),
            lifi: f(Wat::LiFi),
        }
    }

    pub fn get(&self, wat: Wat) -> &T {
        match wat {
            Wat::FiveG => &self.five_g,
            Wat::WiFi => &self.wifi,
            Wat::LiFi => &self.lifi,
        }
    }

    pub fn get_mut(&mut self, wat: Wat) -> &mut T {
        match wat {
            Wat::FiveG => &mut self.five_g,
            Wat::WiFi => &mut self.wifi,
            Wat::LiFi => &mut self.lifi,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(Wat, &T) -> U) -> PerWat<U> {
        PerWat {
            five_g: f(Wat::FiveG, &self.five_g),
            wifi: f(Wat::WiFi, &self.wifi),
            lifi: f(Wat::LiFi, &self.lifi),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Wat, &T)> {
        Wat::ALL.iter().map(move |&w| (w, self.get(w)))
    }
}

impl<T: Clone> PerWat<T> {
    /// Same value for all three WATs.
    pub fn splat(value: T) -> Self {
        Self {
            five_g: value.clone(),
            wifi: value.clone(),
            lifi: value,
        }
    }
}

/// User identifier. The AGV is a user like any other; which id is the AGV
/// is part of the simulation configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub u32);

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Access node identifier, unique across all WATs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

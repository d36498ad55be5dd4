//! Heat-system components. Each one validates its parameters against the
//! network and emits variables, bus taps and constraints into a
//! [`ModelBuilder`].

mod cascade;
mod demand;
mod heat_pump;
mod sources;
mod storage;

use serde::{Deserialize, Serialize};

use crate::network::{ModelBuilder, NetworkError, NetworkModel};

pub use cascade::emit_rise_cascade;
pub use demand::{Demand, DemandDraw};
pub use heat_pump::{HeatPump, HeatPumpSink, HeatPumpSource};
pub use sources::{ConstantEfficiencySource, SourceMode, SourceTarget, TemperatureDependentSource};
pub use storage::{
    ambient_adjustment, cylinder_surface, layer_surfaces, relative_loss, split_surface_overestimate,
    surface_overestimate_closed_form, time_constant, top_layer_height, LayeredStorage, StorageRepresentation,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Component {
    ConstantEfficiencySource(ConstantEfficiencySource),
    TemperatureDependentSource(TemperatureDependentSource),
    HeatPump(HeatPump),
    LayeredStorage(LayeredStorage),
    Demand(Demand),
}

impl Component {
    pub fn id(&self) -> &str {
        match self {
            Component::ConstantEfficiencySource(c) => &c.id,
            Component::TemperatureDependentSource(c) => &c.id,
            Component::HeatPump(c) => &c.id,
            Component::LayeredStorage(c) => &c.id,
            Component::Demand(c) => &c.id,
        }
    }

    pub fn validate(&self, net: &NetworkModel) -> Result<(), NetworkError> {
        match self {
            Component::ConstantEfficiencySource(c) => c.validate(net),
            Component::TemperatureDependentSource(c) => c.validate(net),
            Component::HeatPump(c) => c.validate(net).map(|_| ()),
            Component::LayeredStorage(c) => c.validate(net),
            Component::Demand(c) => c.validate(net),
        }
    }

    pub(crate) fn emit(&self, b: &mut ModelBuilder<'_>) -> Result<(), NetworkError> {
        match self {
            Component::ConstantEfficiencySource(c) => c.emit(b),
            Component::TemperatureDependentSource(c) => c.emit(b),
            Component::HeatPump(c) => c.emit(b),
            Component::LayeredStorage(c) => c.emit(b),
            Component::Demand(c) => c.emit(b),
        }
    }
}

macro_rules! into_component {
    ($($t:ident),*) => {
        $(impl From<$t> for Component {
            fn from(c: $t) -> Self {
                Component::$t(c)
            }
        })*
    };
}

into_component!(ConstantEfficiencySource, TemperatureDependentSource, HeatPump, LayeredStorage, Demand);

fn component_error(id: &str, message: impl Into<String>) -> NetworkError {
    NetworkError::Component { context: id.to_string(), message: message.into() }
}

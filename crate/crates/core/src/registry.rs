//! Taxonomy of transportation-system features by component and problem
//! stage. Only the technical column has computable metrics; the other
//! cells are listed for orientation.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    SocialMobility,
    PublicInfrastructure,
    EnvironmentalImpacts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Defined well enough to measure and optimize now.
    Technical,
    /// Partly specified; needs input from domain experts.
    Sociotechnical,
    /// Still needs basic definition.
    Social,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub component: Component,
    pub stage: Stage,
    pub feature: &'static str,
    /// Name of the implemented metric, if any.
    pub metric: Option<&'static str>,
}

pub const REGISTRY: [Entry; 9] = [
    Entry { component: Component::SocialMobility, stage: Stage::Technical, feature: "Food deserts", metric: Some("eta") },
    Entry { component: Component::SocialMobility, stage: Stage::Sociotechnical, feature: "Housing markets", metric: None },
    Entry { component: Component::SocialMobility, stage: Stage::Social, feature: "Quality of life", metric: None },
    Entry { component: Component::PublicInfrastructure, stage: Stage::Technical, feature: "Road wear", metric: Some("kappa") },
    Entry { component: Component::PublicInfrastructure, stage: Stage::Sociotechnical, feature: "Traffic laws", metric: None },
    Entry { component: Component::PublicInfrastructure, stage: Stage::Social, feature: "Privatization of roads", metric: None },
    Entry { component: Component::EnvironmentalImpacts, stage: Stage::Technical, feature: "Air quality", metric: Some("pollution_exposure") },
    Entry { component: Component::EnvironmentalImpacts, stage: Stage::Sociotechnical, feature: "Induced demand", metric: None },
    Entry { component: Component::EnvironmentalImpacts, stage: Stage::Social, feature: "Cobalt extraction", metric: None },
];

impl Component {
    pub fn label(self) -> &'static str {
        match self {
            Component::SocialMobility => "social mobility",
            Component::PublicInfrastructure => "public infrastructure",
            Component::EnvironmentalImpacts => "environmental impacts",
        }
    }
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::Technical => "technical",
            Stage::Sociotechnical => "sociotechnical",
            Stage::Social => "social",
        }
    }
}

pub fn lookup(component: Component, stage: Stage) -> &'static Entry {
    REGISTRY
        .iter()
        .find(|e| e.component == component && e.stage == stage)
        .expect("registry covers every cell")
}

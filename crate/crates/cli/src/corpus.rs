//! Task files shipped with the binary.

pub struct Example {
    pub name: &'static str,
    pub file: &'static str,
    pub text: &'static str,
}

macro_rules! example {
    ($name:literal) => {
        Example { name: $name, file: concat!($name, ".toml"), text: include_str!(concat!("../corpus/", $name, ".toml")) }
    };
}

pub const EXAMPLES: &[Example] = &[
    example!("point"),
    example!("affine-line"),
    example!("affine-plane"),
    example!("gm"),
    example!("gm-alt"),
    example!("node"),
    example!("ft-point"),
    example!("tube-identity"),
    example!("tube-identity-laurent"),
    example!("noninjective-completion"),
    example!("mixed-complex"),
    example!("spectral-radius"),
];

pub fn find(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name || e.file == name)
}

impl Example {
    /// The `description` field of the task.
    pub fn description(&self) -> String {
        self.text
            .lines()
            .find_map(|l| l.strip_prefix("description = "))
            .map(|s| s.trim_matches('"').to_string())
            .unwrap_or_default()
    }
}

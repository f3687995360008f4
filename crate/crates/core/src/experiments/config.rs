//! Line-oriented `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::ConfigError;
use crate::failure::RadiusDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    SdnFrrd,
    SdnMrc,
    Mrc,
    PathSplicing,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::SdnFrrd, Scheme::SdnMrc, Scheme::Mrc, Scheme::PathSplicing];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SdnFrrd => "SDN-FRRD",
            Scheme::SdnMrc => "SDN-MRC",
            Scheme::Mrc => "MRC",
            Scheme::PathSplicing => "PathSplicing",
        }
    }

    /// Escalations reach a splicing controller.
    pub fn has_controller(self) -> bool {
        matches!(self, Scheme::SdnFrrd | Scheme::SdnMrc)
    }

    /// Backup routes are penalized near the primary route.
    pub fn geographic(self) -> bool {
        self == Scheme::SdnFrrd
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown scheme `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TopologySource {
    File(PathBuf),
    /// One random planar topology per seed.
    Random { nodes: usize, links: usize, width: f64, height: f64, seeds: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum FailureRadius {
    /// A sweep over fixed radii.
    Fixed(Vec<f64>),
    Distribution(RadiusDistribution),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpliceMode {
    LoadAware,
    Shortest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub topology: TopologySource,
    pub k: Vec<usize>,
    pub radius: FailureRadius,
    pub trials: usize,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
    pub r_a: f64,
    pub r_b: f64,
    pub splice: SpliceMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            topology: TopologySource::Random { nodes: 50, links: 120, width: 1200.0, height: 1200.0, seeds: vec![1] },
            k: vec![6],
            radius: FailureRadius::Fixed(vec![50.0]),
            trials: 300,
            seed: 1,
            schemes: vec![Scheme::SdnFrrd],
            r_a: 50.0,
            r_b: 150.0,
            splice: SpliceMode::LoadAware,
        }
    }
}

impl ExperimentConfig {
    /// Number of radius sweep points; a distribution counts as one.
    pub fn points(&self) -> usize {
        match &self.radius {
            FailureRadius::Fixed(r) => r.len(),
            FailureRadius::Distribution(_) => 1,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, message: &str| {
            Err(ConfigError::Invalid { key: key.into(), message: message.into() })
        };
        if self.trials == 0 {
            return invalid("trials", "must be at least 1");
        }
        if self.k.is_empty() || self.k.contains(&0) {
            return invalid("k", "needs positive values");
        }
        if self.schemes.is_empty() {
            return invalid("scheme", "needs at least one scheme");
        }
        if let FailureRadius::Fixed(r) = &self.radius {
            if r.is_empty() || r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return invalid("radius", "needs positive finite values");
            }
        }
        if !(self.r_a > 0.0 && self.r_a <= self.r_b && self.r_b.is_finite()) {
            return invalid("r_a", "needs 0 < r_a <= r_b");
        }
        if let TopologySource::Random { seeds, .. } = &self.topology {
            if seeds.is_empty() {
                return invalid("topology_seed", "needs at least one seed");
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut file: Option<PathBuf> = None;
        let (mut nodes, mut links, mut width, mut height, mut seeds) = (50, 120, 1200.0, 1200.0, vec![1]);
        let mut radius: Option<Vec<f64>> = None;
        let (mut r_min, mut r_max, mut exponent) = (None, None, None);
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| ConfigError::Parse { line, message: format!("expected `key = value`, found `{content}`") })?;
            let bad = |message: String| ConfigError::Parse { line, message: format!("{key}: {message}") };
            match key {
                "topology" if value == "random" => file = None,
                "topology" => file = Some(PathBuf::from(value)),
                "nodes" => nodes = parse_one(value).map_err(bad)?,
                "links" => links = parse_one(value).map_err(bad)?,
                "width" => width = parse_one(value).map_err(bad)?,
                "height" => height = parse_one(value).map_err(bad)?,
                "topology_seed" => seeds = parse_list(value).map_err(bad)?,
                "k" => cfg.k = parse_list(value).map_err(bad)?,
                "radius" => radius = Some(parse_floats(value).map_err(bad)?),
                "radius_min" => r_min = Some(parse_one(value).map_err(bad)?),
                "radius_max" => r_max = Some(parse_one(value).map_err(bad)?),
                "radius_exponent" => exponent = Some(parse_one(value).map_err(bad)?),
                "trials" => cfg.trials = parse_one(value).map_err(bad)?,
                "seed" => cfg.seed = parse_one(value).map_err(bad)?,
                "scheme" => {
                    cfg.schemes = value
                        .split(',')
                        .map(|s| s.trim().parse::<Scheme>())
                        .collect::<Result<_, _>>()
                        .map_err(bad)?
                }
                "r_a" => cfg.r_a = parse_one(value).map_err(bad)?,
                "r_b" => cfg.r_b = parse_one(value).map_err(bad)?,
                "splice" => {
                    cfg.splice = match value {
                        "load-aware" => SpliceMode::LoadAware,
                        "shortest" => SpliceMode::Shortest,
                        _ => return Err(bad(format!("expected load-aware or shortest, found `{value}`"))),
                    }
                }
                _ => return Err(ConfigError::Parse { line, message: format!("unknown key `{key}`") }),
            }
        }
        cfg.topology = match file {
            Some(path) => TopologySource::File(path),
            None => TopologySource::Random { nodes, links, width, height, seeds },
        };
        cfg.radius = match (radius, r_min, r_max) {
            (Some(r), None, None) => FailureRadius::Fixed(r),
            (None, Some(lo), Some(hi)) => {
                FailureRadius::Distribution(RadiusDistribution::new(lo, hi, exponent.unwrap_or(0.0))?)
            }
            (None, None, None) => cfg.radius,
            (_, Some(_), None) => return Err(ConfigError::Missing("radius_max")),
            (_, None, Some(_)) => return Err(ConfigError::Missing("radius_min")),
            (Some(_), Some(_), Some(_)) => {
                return Err(ConfigError::Invalid {
                    key: "radius".into(),
                    message: "give either fixed radii or a radius distribution".into(),
                })
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Inverse of [`ExperimentConfig::parse`].
    pub fn emit(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let mut out = String::new();
        match &self.topology {
            TopologySource::File(p) => out += &format!("topology = {}\n", p.display()),
            TopologySource::Random { nodes, links, width, height, seeds } => {
                out += &format!(
                    "topology = random\nnodes = {nodes}\nlinks = {links}\nwidth = {width}\nheight = {height}\ntopology_seed = {}\n",
                    join(seeds.iter().map(u64::to_string).collect())
                );
            }
        }
        out += &format!("k = {}\n", join(self.k.iter().map(usize::to_string).collect()));
        match &self.radius {
            FailureRadius::Fixed(r) => out += &format!("radius = {}\n", join(r.iter().map(f64::to_string).collect())),
            FailureRadius::Distribution(d) => {
                out += &format!(
                    "radius_min = {}\nradius_max = {}\nradius_exponent = {}\n",
                    d.r_min(),
                    d.r_max(),
                    d.exponent()
                )
            }
        }
        out += &format!("trials = {}\nseed = {}\n", self.trials, self.seed);
        out += &format!("scheme = {}\n", join(self.schemes.iter().map(|s| s.name().to_string()).collect()));
        out += &format!("r_a = {}\nr_b = {}\n", self.r_a, self.r_b);
        let splice = match self.splice {
            SpliceMode::LoadAware => "load-aware",
            SpliceMode::Shortest => "shortest",
        };
        out += &format!("splice = {splice}\n");
        out
    }
}

fn parse_one<T: FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("invalid value `{value}`"))
}

fn parse_floats(value: &str) -> Result<Vec<f64>, String> {
    value.split(',').map(|v| parse_one(v.trim())).collect()
}

/// Comma-separated integers and inclusive ranges such as `6..15`.
fn parse_list<T>(value: &str) -> Result<Vec<T>, String>
where
    T: FromStr + TryFrom<u64>,
{
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim) {
        if let Some((lo, hi)) = part.split_once("..") {
            let (lo, hi): (u64, u64) = (parse_one(lo.trim())?, parse_one(hi.trim())?);
            if lo > hi {
                return Err(format!("empty range `{part}`"));
            }
            for x in lo..=hi {
                out.push(T::try_from(x).map_err(|_| format!("value {x} out of range"))?);
            }
        } else {
            out.push(parse_one(part)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_emit_round_trip() {
        let text = "# sweep\ntopology = random\nnodes = 30\nlinks = 70\ntopology_seed = 1..3\nk = 6..9, 12\n\
                    radius = 50, 75.5\ntrials = 20\nseed = 9\nscheme = SDN-FRRD, mrc\nr_a = 40\nr_b = 90\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.k, vec![6, 7, 8, 9, 12]);
        assert_eq!(cfg.radius, FailureRadius::Fixed(vec![50.0, 75.5]));
        assert_eq!(cfg.schemes, vec![Scheme::SdnFrrd, Scheme::Mrc]);
        assert_eq!(
            cfg.topology,
            TopologySource::Random { nodes: 30, links: 70, width: 1200.0, height: 1200.0, seeds: vec![1, 2, 3] }
        );
        assert_eq!(ExperimentConfig::parse(&cfg.emit()).unwrap(), cfg);
    }

    #[test]
    fn distribution_config() {
        let cfg = ExperimentConfig::parse("radius_min = 10\nradius_max = 150\nradius_exponent = 2\n").unwrap();
        assert!(matches!(cfg.radius, FailureRadius::Distribution(ref d) if d.r_max() == 150.0));
        assert_eq!(ExperimentConfig::parse(&cfg.emit()).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match ExperimentConfig::parse("k = 6\ntrials = many\n") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(ExperimentConfig::parse("trials = 0\n"), Err(ConfigError::Invalid { .. })));
        assert!(matches!(ExperimentConfig::parse("radius_min = 5\n"), Err(ConfigError::Missing("radius_max"))));
        assert!(matches!(ExperimentConfig::parse("colour = red\n"), Err(ConfigError::Parse { line: 1, .. })));
    }
}

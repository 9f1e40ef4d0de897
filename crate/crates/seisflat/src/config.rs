//! Strict INI run configuration.
//!
//! ```ini
//! [synth]
//! dims = 64, 64, 8
//! layers = 0.0909 1.0, 0.149 0.6
//! warp_amplitude = 4
//! warp_frequency = 1
//! noise_sigma = 0
//! seed = 42
//!
//! [filter]
//! dump = false
//!
//! [kernel]
//! propagation_radius = 2
//! calibration_radius = 5
//! delta_floor = 1e-7
//! dump = false
//!
//! [spectral]
//! eigencount = 4
//! tol = 1e-8
//! max_matvecs = 20000
//! seed = 1
//!
//! [flatten]
//! slice_axis = third
//! slice_index = 0
//!
//! [verify]
//! width = 0.5
//! height = 4
//! nx = 32
//! ny = 256
//! identity = true
//! families = vertical-wave, bulge
//! targets = 0.02, 0.05, 0.1
//! k = 2, 4, 6
//! ```
//!
//! `layers` holds `frequency amplitude` pairs. Unknown sections or keys are
//! errors. In `[verify]` exactly one of `targets` (values of `ε d` reached by
//! bisection on the amplitude) and `amplitudes` must be given.

use std::collections::BTreeMap;
use std::str::FromStr;

use ini::Ini;
use seisflat_core::kernel::NeighborhoodSpec;
use seisflat_core::spectral::EigenOptions;
use seisflat_core::stability::{DeformationFamily, RectangleSpec};
use seisflat_core::volume::{Dims, SliceAxis, SliceRef, SynthSpec};

use crate::{Error, Result};

const SECTIONS: &[(&str, &[&str])] = &[
    ("synth", &["dims", "layers", "warp_amplitude", "warp_frequency", "noise_sigma", "seed"]),
    ("filter", &["dump"]),
    ("kernel", &["propagation_radius", "calibration_radius", "delta_floor", "dump"]),
    ("spectral", &["eigencount", "tol", "max_matvecs", "seed"]),
    ("flatten", &["slice_axis", "slice_index"]),
    (
        "verify",
        &[
            "width", "height", "nx", "ny", "identity", "families", "targets", "amplitudes", "k", "d", "samples", "tol",
            "lemma_slack", "seed",
        ],
    ),
];

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSection {
    pub spec: NeighborhoodSpec,
    /// Write the symmetrized kernel as triplets.
    pub dump: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AmplitudeChoice {
    /// Bisect the amplitude until the measured `ε d` reaches each value.
    Targets(Vec<f64>),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySection {
    pub rect: RectangleSpec,
    pub identity: bool,
    pub families: Vec<DeformationFamily>,
    pub amplitudes: AmplitudeChoice,
    pub ks: Vec<usize>,
    pub d: usize,
    pub samples: usize,
    pub tol: f64,
    pub lemma_slack: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub synth: Option<SynthSpec>,
    /// Write the filtered slice as a table.
    pub dump_filtered: bool,
    pub kernel: Option<KernelSection>,
    pub spectral: Option<EigenOptions>,
    pub slice: Option<SliceRef>,
    pub verify: Option<VerifySection>,
}

struct Section<'a> {
    name: &'a str,
    keys: &'a BTreeMap<String, String>,
}

impl Section<'_> {
    fn raw(&self, key: &str) -> Result<&str> {
        self.keys
            .get(key)
            .map(|s| s.trim())
            .ok_or_else(|| Error::Config(format!("missing key `{key}` in [{}]", self.name)))
    }

    fn bad(&self, key: &str, value: &str, what: &str) -> Error {
        Error::Config(format!("[{}] {key} = {value:?}: expected {what}", self.name))
    }

    fn get<T: FromStr>(&self, key: &str, what: &str) -> Result<T> {
        let v = self.raw(key)?;
        v.parse().map_err(|_| self.bad(key, v, what))
    }

    fn get_or<T: FromStr>(&self, key: &str, what: &str, default: T) -> Result<T> {
        if self.keys.contains_key(key) {
            self.get(key, what)
        } else {
            Ok(default)
        }
    }

    fn list<T: FromStr>(&self, key: &str, what: &str) -> Result<Vec<T>> {
        let v = self.raw(key)?;
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(',').map(|item| item.trim().parse().map_err(|_| self.bad(key, v, what))).collect()
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for (name, props) in &ini {
            let Some(name) = name else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(Error::Config(format!("key `{key}` appears before any section")));
                }
                continue;
            };
            let allowed = SECTIONS
                .iter()
                .find(|(s, _)| *s == name)
                .map(|(_, keys)| *keys)
                .ok_or_else(|| Error::Config(format!("unknown section [{name}]")))?;
            if sections.contains_key(name) {
                return Err(Error::Config(format!("section [{name}] appears twice")));
            }
            let mut keys = BTreeMap::new();
            for (key, value) in props.iter() {
                if !allowed.contains(&key) {
                    return Err(Error::Config(format!("unknown key `{key}` in [{name}]")));
                }
                if keys.insert(key.to_string(), value.to_string()).is_some() {
                    return Err(Error::Config(format!("key `{key}` repeated in [{name}]")));
                }
            }
            sections.insert(name.to_string(), keys);
        }
        let section = |name: &'static str| sections.get(name).map(|keys| Section { name, keys });

        let mut cfg = RunConfig::default();
        if let Some(s) = section("synth") {
            cfg.synth = Some(parse_synth(&s)?);
        }
        if let Some(s) = section("filter") {
            cfg.dump_filtered = s.get_or("dump", "true or false", false)?;
        }
        if let Some(s) = section("kernel") {
            let spec = NeighborhoodSpec::new(
                s.get("propagation_radius", "a number")?,
                s.get("calibration_radius", "a number")?,
                s.get("delta_floor", "a number")?,
            )?;
            cfg.kernel = Some(KernelSection { spec, dump: s.get_or("dump", "true or false", false)? });
        }
        if let Some(s) = section("spectral") {
            let defaults = EigenOptions::default();
            cfg.spectral = Some(EigenOptions {
                count: s.get("eigencount", "a positive integer")?,
                tol: s.get("tol", "a number")?,
                max_matvecs: s.get_or("max_matvecs", "a positive integer", defaults.max_matvecs)?,
                seed: s.get("seed", "an unsigned integer")?,
            });
        }
        if let Some(s) = section("flatten") {
            let axis = match s.raw("slice_axis")? {
                "second" => SliceAxis::Second,
                "third" => SliceAxis::Third,
                other => return Err(s.bad("slice_axis", other, "`second` or `third`")),
            };
            cfg.slice = Some(SliceRef::new(axis, s.get("slice_index", "an index")?));
        }
        if let Some(s) = section("verify") {
            cfg.verify = Some(parse_verify(&s)?);
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path).map_err(Error::io(path))?)
    }

    fn need<'a, T>(value: &'a Option<T>, section: &str) -> Result<&'a T> {
        value.as_ref().ok_or_else(|| Error::Config(format!("missing section [{section}]")))
    }

    pub fn synth(&self) -> Result<&SynthSpec> {
        Self::need(&self.synth, "synth")
    }

    pub fn kernel(&self) -> Result<&KernelSection> {
        Self::need(&self.kernel, "kernel")
    }

    pub fn spectral(&self) -> Result<&EigenOptions> {
        Self::need(&self.spectral, "spectral")
    }

    pub fn slice(&self) -> Result<&SliceRef> {
        Self::need(&self.slice, "flatten")
    }

    pub fn verify(&self) -> Result<&VerifySection> {
        Self::need(&self.verify, "verify")
    }
}

fn parse_synth(s: &Section) -> Result<SynthSpec> {
    let dims: Vec<usize> = s.list("dims", "three comma-separated extents")?;
    let [m, n, l] = dims[..] else {
        return Err(s.bad("dims", s.raw("dims")?, "three comma-separated extents"));
    };
    let raw_layers = s.raw("layers")?;
    let mut layers = Vec::new();
    for pair in raw_layers.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let nums: Vec<f64> = pair
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| s.bad("layers", raw_layers, "`frequency amplitude` pairs")))
            .collect::<Result<_>>()?;
        let [f, a] = nums[..] else {
            return Err(s.bad("layers", raw_layers, "`frequency amplitude` pairs"));
        };
        layers.push((f, a));
    }
    let spec = SynthSpec {
        dims: Dims::new(m, n, l),
        layer_frequencies: layers,
        warp_amplitude: s.get("warp_amplitude", "a number")?,
        warp_frequency: s.get("warp_frequency", "a number")?,
        noise_sigma: s.get("noise_sigma", "a number")?,
        seed: s.get("seed", "an unsigned integer")?,
    };
    Ok(spec)
}

fn parse_verify(s: &Section) -> Result<VerifySection> {
    let rect = RectangleSpec::new(
        s.get("width", "a number")?,
        s.get("height", "a number")?,
        s.get("nx", "a cell count")?,
        s.get("ny", "a cell count")?,
    )?;
    let names: Vec<String> = s.list("families", "family names")?;
    let families = names
        .iter()
        .map(|n| {
            DeformationFamily::from_name(n)
                .filter(|f| *f != DeformationFamily::Identity)
                .ok_or_else(|| s.bad("families", n, "`vertical-wave` or `bulge`"))
        })
        .collect::<Result<Vec<_>>>()?;
    let amplitudes = match (s.keys.contains_key("targets"), s.keys.contains_key("amplitudes")) {
        (true, false) => AmplitudeChoice::Targets(s.list("targets", "comma-separated numbers")?),
        (false, true) => AmplitudeChoice::Explicit(s.list("amplitudes", "comma-separated numbers")?),
        _ => return Err(Error::Config("[verify] needs exactly one of `targets` and `amplitudes`".into())),
    };
    let ks: Vec<usize> = s.list("k", "comma-separated positive integers")?;
    if ks.is_empty() || ks.contains(&0) {
        return Err(s.bad("k", s.raw("k")?, "comma-separated positive integers"));
    }
    Ok(VerifySection {
        rect,
        identity: s.get_or("identity", "true or false", true)?,
        families,
        amplitudes,
        ks,
        d: s.get_or("d", "a positive integer", 2)?,
        samples: s.get_or("samples", "a sample count", 64)?,
        tol: s.get_or("tol", "a number", 1e-8)?,
        lemma_slack: s.get_or("lemma_slack", "a number", 1e-8)?,
        seed: s.get_or("seed", "an unsigned integer", 0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYNTH: &str = "[synth]\ndims = 8, 8, 4\nlayers = 0.1 1.0, 0.2 0.5\nwarp_amplitude = 1\nwarp_frequency = 1\nnoise_sigma = 0\nseed = 7\n";

    #[test]
    fn parses_synth() {
        let cfg = RunConfig::parse(SYNTH).unwrap();
        let s = cfg.synth().unwrap();
        assert_eq!(s.dims, Dims::new(8, 8, 4));
        assert_eq!(s.layer_frequencies, vec![(0.1, 1.0), (0.2, 0.5)]);
        assert_eq!(s.seed, 7);
        assert!(cfg.kernel().is_err());
    }

    #[test]
    fn empty_layer_list() {
        let cfg = RunConfig::parse(&SYNTH.replace("0.1 1.0, 0.2 0.5", "")).unwrap();
        assert!(cfg.synth().unwrap().layer_frequencies.is_empty());
    }

    #[test]
    fn missing_key_is_named() {
        let err = RunConfig::parse(&SYNTH.replace("dims = 8, 8, 4\n", "")).unwrap_err();
        assert!(err.to_string().contains("missing key `dims` in [synth]"), "{err}");
    }

    #[test]
    fn unknown_keys_and_sections() {
        assert!(RunConfig::parse(&format!("{SYNTH}colour = red\n")).unwrap_err().to_string().contains("unknown key"));
        assert!(RunConfig::parse("[extra]\n").unwrap_err().to_string().contains("unknown section"));
        assert!(RunConfig::parse("seed = 1\n[synth]\n").is_err());
        assert!(RunConfig::parse(&format!("{SYNTH}seed = 8\n")).is_err());
    }

    #[test]
    fn verify_section() {
        let text = "[verify]\nwidth = 0.5\nheight = 4\nnx = 8\nny = 32\nfamilies = bulge\ntargets = 0.05\nk = 2, 4\n";
        let v = RunConfig::parse(text).unwrap().verify.unwrap();
        assert_eq!(v.ks, vec![2, 4]);
        assert_eq!(v.families, vec![DeformationFamily::Bulge]);
        assert_eq!(v.amplitudes, AmplitudeChoice::Targets(vec![0.05]));
        assert!(v.identity);
        for bad in ["k = 2, x", "k = 0", "k = "] {
            assert!(RunConfig::parse(&text.replace("k = 2, 4", bad)).is_err(), "{bad}");
        }
        assert!(RunConfig::parse(&text.replace("targets", "amplitudes").replace("k =", "targets = 0.1\nk =")).is_err());
        assert!(RunConfig::parse(&text.replace("bulge", "identity")).is_err());
    }

    #[test]
    fn kernel_and_flatten() {
        let text = "[kernel]\npropagation_radius = 2\ncalibration_radius = 5\ndelta_floor = 1e-7\n[spectral]\neigencount = 4\ntol = 1e-8\nseed = 3\n[flatten]\nslice_axis = second\nslice_index = 2\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.kernel().unwrap().spec, NeighborhoodSpec::default());
        assert_eq!(cfg.spectral().unwrap().max_matvecs, 20_000);
        assert_eq!(*cfg.slice().unwrap(), SliceRef::new(SliceAxis::Second, 2));
        assert!(RunConfig::parse(&text.replace("second", "first")).is_err());
        assert!(RunConfig::parse(&text.replace("1e-7", "2")).is_err());
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::chart::BundleChart;
use crate::error::{Error, Result};
use crate::exterior::{parse_form, Form, Tag};
use crate::scalar::{Domain, Exclusion};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseVar {
    pub var: String,
    pub interval: (f64, f64),
}

/// Text description of a bundle chart:
///
/// ```toml
/// name = "s3-hopf"
/// fibers = ["theta"]
/// flux = "(form)"
///
/// [[base]]
/// var = "t"
/// interval = [-0.9, 0.9]
///
/// [curvature]
/// theta = "(form (term 1 dt ds))"
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartConfig {
    pub name: String,
    pub base: Vec<BaseVar>,
    #[serde(default)]
    pub fibers: Vec<String>,
    #[serde(default)]
    pub curvature: BTreeMap<String, String>,
    #[serde(default = "empty_form")]
    pub flux: String,
    #[serde(default)]
    pub exclusions: Vec<Exclusion>,
}

fn empty_form() -> String {
    "(form)".into()
}

impl ChartConfig {
    pub fn from_toml(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<BundleChart> {
        let domain = Domain {
            vars: self.base.iter().map(|b| b.var.clone()).collect(),
            intervals: self.base.iter().map(|b| b.interval).collect(),
            exclusions: self.exclusions.clone(),
        };
        domain.validate()?;
        let names: Vec<&str> = self.fibers.iter().map(String::as_str).collect();
        let cf = BundleChart::make_coframe(&domain, Tag::Fiber, &names)?;
        for key in self.curvature.keys() {
            if !self.fibers.contains(key) {
                return Err(Error::Config(format!("curvature given for unknown fiber {key:?}")));
            }
        }
        let curvature = self
            .fibers
            .iter()
            .map(|f| match self.curvature.get(f) {
                Some(src) => parse_form(&cf, src),
                None => Ok(Form::zero(&cf)),
            })
            .collect::<Result<Vec<_>>>()?;
        let flux = parse_form(&cf, &self.flux)?;
        BundleChart::new(&self.name, cf, domain, curvature, flux)
    }

    /// Inverse of [`ChartConfig::build`].
    pub fn from_chart(ch: &BundleChart) -> Self {
        let cf = ch.coframe();
        let dom = ch.domain();
        ChartConfig {
            name: ch.name.clone(),
            base: dom.vars.iter().zip(&dom.intervals).map(|(v, i)| BaseVar { var: v.clone(), interval: *i }).collect(),
            fibers: ch.fiber_indices().iter().map(|&i| cf.gen(i).name.clone()).collect(),
            curvature: ch
                .fiber_indices()
                .iter()
                .enumerate()
                .filter(|(j, _)| !ch.curvature(*j).is_zero())
                .map(|(j, &i)| (cf.gen(i).name.clone(), ch.curvature(j).to_string()))
                .collect(),
            flux: ch.flux().to_string(),
            exclusions: dom.exclusions.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HOPF: &str = r#"
name = "s3-hopf"
fibers = ["theta"]
flux = "(form)"

[[base]]
var = "t"
interval = [-0.9, 0.9]

[[base]]
var = "s"
interval = [0.0, 6.0]

[curvature]
theta = "(form (term 1 dt ds))"
"#;

    #[test]
    fn reads_and_writes_configs() {
        let cfg = ChartConfig::from_toml(HOPF).unwrap();
        let ch = cfg.build().unwrap();
        assert_eq!(ch.rank(), 1);
        assert_eq!(ch.curvature(0).to_string(), "(form (term 1 dt ds))");
        let again = ChartConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(ChartConfig::from_chart(&ch), cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = HOPF.replace("[-0.9, 0.9]", "[0.9, -0.9]");
        assert!(ChartConfig::from_toml(&bad).unwrap().build().is_err());
        let bad = HOPF.replace("theta = ", "phi = ");
        assert!(ChartConfig::from_toml(&bad).unwrap().build().is_err());
        let bad = HOPF.replace("flux = \"(form)\"", "flux = \"(form (term 1 dt))\"");
        assert!(ChartConfig::from_toml(&bad).unwrap().build().is_err());
    }
}

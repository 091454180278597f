//! JSON representations of states, density operators, characters of second
//! degree and stabilizer groups.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Group, Subgroup};
use crate::phase::PhaseExp;
use crate::phase_space::IsotropicSubgroup;
use crate::quadratic::Char2;
use crate::stabilizer::{ModuliClass, StabilizerGroup, StateEntry};
use crate::weyl::{DensityOperator, ExactForm, WaveFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetJson {
    pub representative: String,
    pub subgroup: Vec<String>,
}

/// `{"group", "amplitudes"}` or the exact form `{"group", "coset", "phases",
/// "scale"}`; both may be present, in which case the exact form wins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveFunctionJson {
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coset: Option<CosetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub group: String,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Char2Json {
    pub support: Vec<String>,
    pub values: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropicJson {
    #[serde(rename = "H")]
    pub h: Vec<String>,
    pub orders: Vec<u64>,
    pub beta: Vec<Vec<u64>>,
    pub elements: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerGroupJson {
    pub group: String,
    #[serde(rename = "K")]
    pub k: IsotropicJson,
    pub alpha: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuliJson {
    #[serde(rename = "H")]
    pub h: Vec<String>,
    pub y: String,
    #[serde(rename = "h")]
    pub character: Char2Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub moduli: ModuliJson,
    pub group: StabilizerGroupJson,
    pub wavefunction: WaveFunctionJson,
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn elements(h: &Subgroup) -> Vec<String> {
    h.elements().iter().map(|&e| h.group().format_index(e)).collect()
}

pub fn wavefunction_to_json(psi: &WaveFunction) -> WaveFunctionJson {
    let mut out = WaveFunctionJson {
        group: psi.group().to_string(),
        amplitudes: Some(psi.amplitudes().iter().map(|&a| pair(a)).collect()),
        coset: None,
        phases: None,
        scale: None,
    };
    if let Some(e) = psi.exact() {
        out.coset = Some(CosetJson {
            representative: psi.group().format_index(e.representative),
            subgroup: elements(&e.subgroup),
        });
        out.phases = Some(e.phases.iter().map(|p| p.exponent()).collect());
        out.scale = Some(e.scale);
    }
    out
}

pub fn wavefunction_from_json(json: &WaveFunctionJson) -> Result<WaveFunction> {
    let group: Group = json.group.parse()?;
    if let Some(coset) = &json.coset {
        let rep = group.parse_index(&coset.representative)?;
        let members = coset
            .subgroup
            .iter()
            .map(|s| group.parse_index(s))
            .collect::<Result<Vec<_>>>()?;
        let phases_in = json
            .phases
            .as_ref()
            .ok_or_else(|| Error::Parse("exact form needs \"phases\"".into()))?;
        if phases_in.len() != members.len() {
            return Err(Error::Parse("one phase per subgroup element is required".into()));
        }
        let sub = Arc::new(Subgroup::from_elements(&group, members.clone())?);
        let modulus = group.phase_modulus();
        let mut phases = vec![PhaseExp::one(modulus); sub.len()];
        for (&m, &p) in members.iter().zip(phases_in) {
            phases[sub.position(m).expect("member")] = PhaseExp::new(p as i128, modulus);
        }
        return WaveFunction::from_exact(ExactForm {
            subgroup: sub,
            representative: rep,
            phases,
            scale: json.scale.unwrap_or(1.0),
        });
    }
    let amps = json
        .amplitudes
        .as_ref()
        .ok_or_else(|| Error::Parse("state needs \"amplitudes\" or an exact \"coset\" form".into()))?;
    WaveFunction::new(&group, amps.iter().map(|a| Complex64::new(a[0], a[1])).collect())
}

pub fn density_to_json(rho: &DensityOperator) -> DensityJson {
    let m = rho.matrix();
    DensityJson {
        group: rho.group().to_string(),
        matrix: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect()).collect(),
    }
}

pub fn density_from_json(json: &DensityJson) -> Result<DensityOperator> {
    let group: Group = json.group.parse()?;
    let n = group.size();
    if json.matrix.len() != n || json.matrix.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidDensity(format!("expected a {n}×{n} matrix")));
    }
    let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(json.matrix[i][j][0], json.matrix[i][j][1]));
    DensityOperator::new(&group, m)
}

pub fn char2_to_json(h: &Char2) -> Char2Json {
    Char2Json {
        support: elements(h.domain()),
        values: h.values().iter().map(|v| v.exponent()).collect(),
    }
}

pub fn isotropic_to_json(k: &IsotropicSubgroup) -> IsotropicJson {
    let group = k.group();
    let d = k.subgroup().decomposition();
    IsotropicJson {
        h: d.basis().iter().map(|&g| group.format_index(g)).collect(),
        orders: d.orders().to_vec(),
        beta: k.beta().matrix().to_vec(),
        elements: k
            .points()
            .iter()
            .map(|&p| {
                let (x, xi) = group.point_parts(p);
                [group.format_index(x), group.format_index(xi)]
            })
            .collect(),
    }
}

pub fn stabilizer_to_json(g: &StabilizerGroup) -> StabilizerGroupJson {
    StabilizerGroupJson {
        group: g.group().to_string(),
        k: isotropic_to_json(g.isotropic()),
        alpha: g.alpha().iter().map(|a| a.exponent()).collect(),
    }
}

/// Reads a stabilizer group from its element list and `α` table.
pub fn stabilizer_from_json(json: &StabilizerGroupJson) -> Result<StabilizerGroup> {
    let group: Group = json.group.parse()?;
    if json.alpha.len() != json.k.elements.len() {
        return Err(Error::NotStabilizerGroup("one α value per element of K is required".into()));
    }
    let modulus = group.phase_modulus();
    let table = json
        .k
        .elements
        .iter()
        .zip(&json.alpha)
        .map(|([x, xi], &a)| {
            let p = group.point_index(group.parse_index(x)?, group.parse_index(xi)?);
            Ok((p, PhaseExp::new(a as i128, modulus)))
        })
        .collect::<Result<Vec<_>>>()?;
    StabilizerGroup::from_table(&group, &table)
}

pub fn moduli_to_json(m: &ModuliClass) -> ModuliJson {
    ModuliJson {
        h: elements(m.subgroup()),
        y: m.subgroup().group().format_index(m.y()),
        character: char2_to_json(m.character()),
    }
}

pub fn state_record(entry: &StateEntry) -> StateRecord {
    StateRecord {
        moduli: moduli_to_json(&entry.moduli),
        group: stabilizer_to_json(&entry.stabilizer),
        wavefunction: wavefunction_to_json(&entry.wavefunction()),
    }
}

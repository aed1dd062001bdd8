//! Deterministic synthetic tables.
//!
//! Every column draws from its own ChaCha stream derived from the table
//! seed and the column position, so adding a column never changes the
//! values of the others.

use colf::bitvec::BitVector;
use colf::{Column, ColumnType, Field, PlainColumns, Schema, Value};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, WeightedIndex, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Integers uniform on `min..=max`.
    Uniform { min: i64, max: i64 },
    /// Floats `k / 10^scale` with `k` uniform on `min..=max`.
    Decimal { min: i64, max: i64, scale: u8 },
    /// Full-precision floats uniform on `[min, max)`.
    UniformFloat { min: f64, max: f64 },
    /// Zipf ranks over `cardinality` values; rank `r` becomes
    /// `(first + r - 1) % cardinality`.
    Zipf { cardinality: u64, skew: f64, first: u64 },
    /// `values` cycled, each repeated `run_len` times.
    Runs { values: Vec<i64>, run_len: u64 },
    /// `start + i / repeat`.
    Sequential { start: i64, repeat: u64 },
    /// `cardinality` distinct random strings of `len` characters, drawn uniformly.
    StringPool { cardinality: usize, len: usize },
    /// `values[i]` with probability proportional to `weights[i]`.
    Categorical { values: Vec<String>, weights: Vec<f64> },
    /// Unit-norm vectors with Gaussian direction.
    Vector { dim: u32 },
}

impl Generator {
    fn check(&self, ty: ColumnType) -> Result<()> {
        let bad = |m: String| Err(BenchError::Config(m));
        let ty_ok = match self {
            Generator::Uniform { .. } | Generator::Zipf { .. } | Generator::Runs { .. } | Generator::Sequential { .. } => {
                ty.is_integer()
            }
            Generator::Decimal { .. } | Generator::UniformFloat { .. } => ty == ColumnType::Float64,
            Generator::StringPool { .. } | Generator::Categorical { .. } => ty == ColumnType::Utf8,
            Generator::Vector { dim } => ty == ColumnType::FixedVector(*dim),
        };
        if !ty_ok {
            return bad(format!("generator {self:?} cannot produce {ty} values"));
        }
        match self {
            Generator::Uniform { min, max } | Generator::Decimal { min, max, .. } if min > max => {
                bad(format!("empty range {min}..={max}"))
            }
            Generator::Decimal { scale, .. } if *scale > 9 => bad(format!("scale {scale} above 9")),
            Generator::UniformFloat { min, max } if !(min < max) => bad(format!("empty range [{min}, {max})")),
            Generator::Zipf { cardinality, skew, first } if *cardinality == 0 || *skew <= 0.0 || first >= cardinality => {
                bad(format!("zipf needs cardinality > 0, skew > 0 and first < cardinality, got {cardinality}, {skew}, {first}"))
            }
            Generator::Runs { values, run_len } if values.is_empty() || *run_len == 0 => {
                bad("runs need at least one value and a positive run length".into())
            }
            Generator::Sequential { repeat: 0, .. } => bad("sequential repeat must be positive".into()),
            Generator::StringPool { cardinality, len } => {
                let space = (ALPHABET.len() as f64).powi(*len as i32);
                if *cardinality == 0 || (*cardinality as f64) > space {
                    bad(format!("cannot draw {cardinality} distinct strings of length {len}"))
                } else {
                    Ok(())
                }
            }
            Generator::Categorical { values, weights } => {
                if values.is_empty() || values.len() != weights.len() || weights.iter().any(|w| !(*w >= 0.0)) {
                    bad("categorical needs one non-negative weight per value".into())
                } else if weights.iter().sum::<f64>() <= 0.0 {
                    bad("categorical weights sum to zero".into())
                } else {
                    Ok(())
                }
            }
            Generator::Vector { dim: 0 } => bad("vector dimension must be positive".into()),
            _ => Ok(()),
        }
    }
}

const ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub ty: ColumnType,
    pub generator: Generator,
    #[serde(default)]
    pub null_rate: f64,
}

impl ColumnSpec {
    pub fn new(name: &str, ty: ColumnType, generator: Generator) -> Self {
        ColumnSpec { name: name.into(), ty, generator, null_rate: 0.0 }
    }

    pub fn with_nulls(mut self, rate: f64) -> Self {
        self.null_rate = rate;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    pub columns: Vec<ColumnSpec>,
    pub rows: usize,
    pub seed: u64,
}

impl TableSpec {
    pub fn schema(&self) -> Result<Schema> {
        Ok(Schema::new(self.columns.iter().map(|c| Field::new(&c.name, c.ty, c.null_rate > 0.0)).collect())?)
    }
}

fn column_rng(seed: u64, j: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (j as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn int_value(ty: ColumnType, v: i64) -> Value {
    match ty {
        ColumnType::Int32 => Value::Int32(v as i32),
        _ => Value::Int64(v),
    }
}

fn string_pool(rng: &mut ChaCha8Rng, cardinality: usize, len: usize) -> Vec<String> {
    let mut seen = std::collections::HashSet::with_capacity(cardinality);
    let mut pool = Vec::with_capacity(cardinality);
    while pool.len() < cardinality {
        let s: String = (0..len).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())] as char).collect();
        if seen.insert(s.clone()) {
            pool.push(s);
        }
    }
    pool
}

fn gen_column(spec: &ColumnSpec, rows: usize, rng: &mut ChaCha8Rng) -> Result<Column> {
    spec.generator.check(spec.ty)?;
    if !(0.0..=1.0).contains(&spec.null_rate) {
        return Err(BenchError::config(format!("null rate {} outside [0, 1]", spec.null_rate)));
    }
    let ty = spec.ty;
    let mut values: Vec<Value> = match &spec.generator {
        Generator::Uniform { min, max } => (0..rows).map(|_| int_value(ty, rng.gen_range(*min..=*max))).collect(),
        Generator::Decimal { min, max, scale } => {
            let p = 10f64.powi(*scale as i32);
            (0..rows).map(|_| Value::float(rng.gen_range(*min..=*max) as f64 / p)).collect()
        }
        Generator::UniformFloat { min, max } => (0..rows).map(|_| Value::float(rng.gen_range(*min..*max))).collect(),
        Generator::Zipf { cardinality, skew, first } => {
            let z = Zipf::new(*cardinality, *skew).map_err(|e| BenchError::config(format!("zipf: {e}")))?;
            (0..rows)
                .map(|_| {
                    let rank = z.sample(rng) as u64;
                    int_value(ty, ((first + rank - 1) % cardinality) as i64)
                })
                .collect()
        }
        Generator::Runs { values, run_len } => {
            (0..rows).map(|i| int_value(ty, values[(i as u64 / run_len) as usize % values.len()])).collect()
        }
        Generator::Sequential { start, repeat } => {
            (0..rows).map(|i| int_value(ty, start + (i as u64 / repeat) as i64)).collect()
        }
        Generator::StringPool { cardinality, len } => {
            let pool = string_pool(rng, *cardinality, *len);
            let mut v: Vec<Value> = (0..rows).map(|_| Value::str(pool[rng.gen_range(0..pool.len())].clone())).collect();
            // every pool entry appears when there is room for it
            if rows >= pool.len() {
                for (k, at) in sample(rng, rows, pool.len()).into_iter().enumerate() {
                    v[at] = Value::str(pool[k].clone());
                }
            }
            v
        }
        Generator::Categorical { values, weights } => {
            let w = WeightedIndex::new(weights).map_err(|e| BenchError::config(format!("categorical: {e}")))?;
            (0..rows).map(|_| Value::str(values[w.sample(rng)].clone())).collect()
        }
        Generator::Vector { dim } => (0..rows)
            .map(|_| {
                let mut v: Vec<f64> = (0..*dim).map(|_| StandardNormal.sample(rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                v.iter_mut().for_each(|x| *x /= norm);
                Value::Vector(v)
            })
            .collect(),
    };
    if spec.null_rate > 0.0 {
        for v in values.iter_mut() {
            if rng.gen_bool(spec.null_rate) {
                *v = Value::Null;
            }
        }
    }
    Ok(Column::from_values(ty, &values)?)
}

/// Generates the table described by `spec`. Identical specs give identical tables.
pub fn gen_table(spec: &TableSpec) -> Result<PlainColumns> {
    let schema = spec.schema()?;
    let columns = spec
        .columns
        .iter()
        .enumerate()
        .map(|(j, c)| gen_column(c, spec.rows, &mut column_rng(spec.seed, j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PlainColumns::new(schema, columns, spec.rows)?)
}

/// A selection vector over `n` rows with exactly `round(s * n)` bits set at
/// uniformly random positions.
pub fn gen_selection(n: usize, s: f64, seed: u64) -> Result<BitVector> {
    if !(0.0..=1.0).contains(&s) {
        return Err(BenchError::config(format!("selectivity {s} outside [0, 1]")));
    }
    let k = (s * n as f64).round() as usize;
    let mut bv = BitVector::zeros(n);
    for i in sample(&mut ChaCha8Rng::seed_from_u64(seed), n, k) {
        bv.set(i);
    }
    Ok(bv)
}

pub const SALES_ROWS: usize = 1_000_000;
pub const DEMOGRAPHICS_ROWS: usize = 200_000;

/// `cs_ship_date_sk > SHIP_DATE_CUT` selects 65% of rows.
pub const SHIP_DATE_CUT: i64 = 2_450_034;
/// `cs_wholesale_cost > WHOLESALE_CUT` selects 30% of rows.
pub const WHOLESALE_CUT: f64 = 70.0;
/// `cd_education_status = 'Secondary'` selects 14% of rows.
pub const EDUCATION_SHARE: f64 = 0.14;

pub const EDUCATION: [&str; 7] =
    ["Primary", "Secondary", "College", "2 yr Degree", "4 yr Degree", "Advanced Degree", "Unknown"];

/// A 34-column table shaped like TPC-DS `catalog_sales`.
pub fn sales_spec(rows: usize, seed: u64) -> TableSpec {
    use ColumnType::{Float64 as F, Int32 as I32, Int64 as I};
    let u = |min, max| Generator::Uniform { min, max };
    let d = |min, max| Generator::Decimal { min, max, scale: 2 };
    let c = ColumnSpec::new;
    let columns = vec![
        c("cs_sold_date_sk", I, u(2_450_815, 2_452_654)),
        c("cs_sold_time_sk", I, Generator::Zipf { cardinality: 86_400, skew: 1.2, first: 12_032 }),
        c("cs_ship_date_sk", I, u(2_450_000, 2_450_099)),
        c("cs_bill_customer_sk", I, u(1, 100_000)).with_nulls(0.005),
        c("cs_bill_cdemo_sk", I, u(1, 1_920_800)).with_nulls(0.005),
        c("cs_bill_hdemo_sk", I, u(1, 7_200)).with_nulls(0.005),
        c("cs_bill_addr_sk", I, u(1, 50_000)).with_nulls(0.005),
        c("cs_ship_customer_sk", I, u(1, 100_000)).with_nulls(0.005),
        c("cs_ship_cdemo_sk", I, u(1, 1_920_800)).with_nulls(0.005),
        c("cs_ship_hdemo_sk", I, u(1, 7_200)).with_nulls(0.005),
        c("cs_ship_addr_sk", I, u(1, 50_000)).with_nulls(0.005),
        c("cs_call_center_sk", I, u(1, 6)),
        c("cs_catalog_page_sk", I, u(1, 11_718)),
        c("cs_ship_mode_sk", I, u(1, 20)),
        c("cs_warehouse_sk", I, u(1, 5)),
        c("cs_item_sk", I, u(1, 18_000)),
        c("cs_promo_sk", I, u(1, 300)).with_nulls(0.005),
        c("cs_order_number", I, Generator::Sequential { start: 1, repeat: 10 }),
        c("cs_quantity", I32, u(1, 100)),
        c("cs_wholesale_cost", F, d(0, 9_999)),
        c("cs_list_price", F, d(100, 30_000)),
        c("cs_sales_price", F, d(0, 30_000)),
        c("cs_ext_discount_amt", F, d(0, 2_000_000)),
        c("cs_ext_sales_price", F, d(0, 3_000_000)),
        c("cs_ext_wholesale_cost", F, d(100, 1_000_000)),
        c("cs_ext_list_price", F, d(100, 3_000_000)),
        c("cs_ext_tax", F, d(0, 100_000)),
        c("cs_coupon_amt", F, d(0, 2_000_000)).with_nulls(0.005),
        c("cs_ext_ship_cost", F, d(0, 1_500_000)),
        c("cs_net_paid", F, d(0, 3_000_000)),
        c("cs_net_paid_inc_tax", F, d(0, 3_200_000)),
        c("cs_net_paid_inc_ship", F, d(0, 4_300_000)),
        c("cs_net_paid_inc_ship_tax", F, d(0, 4_500_000)),
        c("cs_net_profit", F, d(-1_000_000, 2_000_000)),
    ];
    TableSpec { columns, rows, seed }
}

fn categorical(values: &[&str], weights: &[f64]) -> Generator {
    Generator::Categorical { values: values.iter().map(|s| s.to_string()).collect(), weights: weights.to_vec() }
}

/// A 9-column table shaped like TPC-DS `customer_demographics`.
pub fn demographics_spec(rows: usize, seed: u64) -> TableSpec {
    use ColumnType::{Int32 as I32, Int64 as I, Utf8 as S};
    let other = (1.0 - EDUCATION_SHARE) / 6.0;
    let edu_weights: Vec<f64> = EDUCATION.iter().map(|e| if *e == "Secondary" { EDUCATION_SHARE } else { other }).collect();
    let c = ColumnSpec::new;
    let columns = vec![
        c("cd_demo_sk", I, Generator::Sequential { start: 1, repeat: 1 }),
        c("cd_gender", S, categorical(&["M", "F"], &[1.0, 1.0])),
        c("cd_marital_status", S, categorical(&["M", "S", "D", "W", "U"], &[1.0; 5])),
        c("cd_education_status", S, categorical(&EDUCATION, &edu_weights)),
        c("cd_purchase_estimate", I32, Generator::Uniform { min: 500, max: 10_000 }),
        c("cd_credit_rating", S, categorical(&["Good", "High Risk", "Low Risk", "Unknown"], &[1.0; 4])),
        c("cd_dep_count", I32, Generator::Uniform { min: 0, max: 6 }),
        c("cd_dep_employed_count", I32, Generator::Uniform { min: 0, max: 6 }),
        c("cd_dep_college_count", I32, Generator::Uniform { min: 0, max: 6 }),
    ];
    TableSpec { columns, rows, seed }
}

//! Naive row-at-a-time executor used as the correctness oracle.

use colf::{Column, PlainColumns, Predicate, SubexpressionQuery, Value};

use crate::error::Result;

/// True when every predicate holds for `row`; nulls never match.
pub fn row_matches(row: &[Value], preds: &[(usize, &Predicate)]) -> Result<bool> {
    for (j, p) in preds {
        let v = &row[*j];
        if v.is_null() || !colf::predicate_eval_scalar(p, v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Evaluates `q` over `table` one row at a time.
pub fn reference_query(table: &PlainColumns, q: &SubexpressionQuery) -> Result<PlainColumns> {
    let preds = q
        .predicates
        .iter()
        .map(|p| Ok((table.schema.index_of(&p.column)?, p)))
        .collect::<Result<Vec<_>>>()?;
    let proj = q.projection.iter().map(|c| table.schema.index_of(c)).collect::<colf::Result<Vec<_>>>()?;
    let schema = colf::Schema::projected(proj.iter().map(|&j| table.schema.field(j).clone()).collect());
    let mut out: Vec<Column> = proj.iter().map(|&j| Column::empty(table.schema.field(j).ty)).collect();
    let mut rows = 0;
    for row in table.rows() {
        if row_matches(&row, &preds)? {
            for (c, &j) in out.iter_mut().zip(&proj) {
                c.push(&row[j])?;
            }
            rows += 1;
        }
    }
    Ok(PlainColumns::new(schema, out, rows)?)
}

/// Row indices matching every predicate.
pub fn reference_matches(table: &PlainColumns, preds: &[Predicate]) -> Result<Vec<bool>> {
    let bound = preds.iter().map(|p| Ok((table.schema.index_of(&p.column)?, p))).collect::<Result<Vec<_>>>()?;
    table.rows().map(|row| row_matches(&row, &bound)).collect()
}

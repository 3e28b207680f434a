//! OpenAPI 3 export. Every field becomes a string property whose length
//! comes from its picture.

use std::collections::{BTreeMap, BTreeSet};

use apify_core::frontend::Picture;
use serde_json::{json, Map, Value};

use crate::output::{FieldDoc, SignatureDoc};

const UNSIGNED_DIGITS: &str = "^[0-9]*$";
const SIGNED_DECIMAL: &str = "^[+-]?[0-9]*(\\.[0-9]*)?$";

/// Schema of one field; groups without a picture use their byte size.
fn property(picture: Option<&str>, group_size: Option<u32>) -> Value {
    let mut p = Map::new();
    p.insert("type".into(), json!("string"));
    let parsed = picture.and_then(|t| Picture::parse(t, 0).ok());
    match parsed {
        Some(pic) => {
            let decimal = pic.text.to_ascii_uppercase().contains('V');
            let len = pic.positions + u32::from(pic.numeric && pic.signed) + u32::from(decimal);
            p.insert("maxLength".into(), json!(len));
            if pic.numeric {
                let pattern = if pic.signed || decimal { SIGNED_DECIMAL } else { UNSIGNED_DIGITS };
                p.insert("pattern".into(), json!(pattern));
            }
        }
        None => {
            if let Some(n) = group_size {
                p.insert("maxLength".into(), json!(n));
            }
        }
    }
    Value::Object(p)
}

/// Object schema with one property per field; a field name used twice
/// falls back to its qualified name.
fn object_schema(fields: &[FieldDoc], group_sizes: &BTreeMap<String, u32>) -> Value {
    let mut seen = BTreeSet::new();
    let duplicated: BTreeSet<&str> = fields.iter().map(|f| f.field.as_str()).filter(|n| !seen.insert(*n)).collect();
    let mut properties = Map::new();
    let mut required = Vec::new();
    for f in fields {
        let key = if duplicated.contains(f.field.as_str()) { f.qualified.clone() } else { f.field.clone() };
        properties.insert(key.clone(), property(f.picture.as_deref(), group_sizes.get(&f.qualified).copied()));
        if !f.optional {
            required.push(key);
        }
    }
    required.sort();
    let mut schema = Map::new();
    schema.insert("type".into(), json!("object"));
    schema.insert("properties".into(), Value::Object(properties));
    if !required.is_empty() {
        schema.insert("required".into(), json!(required));
    }
    Value::Object(schema)
}

/// One exported API: its signature document and a description.
pub struct Operation<'a> {
    pub doc: &'a SignatureDoc,
    pub description: String,
    /// Byte size of group fields (fields without a picture), by qualified name.
    pub group_sizes: BTreeMap<String, u32>,
}

/// OpenAPI document with one path item `/apis/<name>` per operation.
pub fn document(ops: &[Operation<'_>]) -> Value {
    let mut paths = Map::new();
    for op in ops {
        let d = op.doc;
        let content = |schema: Value| json!({"application/json": {"schema": schema}});
        let operation = json!({
            "operationId": d.api.name,
            "description": op.description,
            "requestBody": {
                "required": true,
                "content": content(object_schema(&d.requests, &op.group_sizes)),
            },
            "responses": {
                "200": {
                    "description": "OK",
                    "content": content(object_schema(&d.responses, &op.group_sizes)),
                }
            }
        });
        let mut item = Map::new();
        item.insert(d.api.method.to_string(), operation);
        paths.insert(format!("/apis/{}", d.api.name), Value::Object(item));
    }
    json!({
        "openapi": "3.0.3",
        "info": {"title": "apify export", "version": "1.0.0"},
        "paths": paths,
    })
}

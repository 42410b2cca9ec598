//! Seeded synthetic accommodation data and the mappings that read it.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::BenchError;
use crate::source::SourceFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Nesting {
    /// Scalar fields only, mapped by one triples map.
    Flat,
    /// Accommodations with a `contactDetails` list of addresses, mapped by a
    /// resort map with a nested address map.
    Nested,
}

impl fmt::Display for Nesting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Nesting::Flat => "flat",
            Nesting::Nested => "nested",
        })
    }
}

impl FromStr for Nesting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "flat" => Ok(Nesting::Flat),
            "nested" => Ok(Nesting::Nested),
            other => Err(format!("unknown nesting `{other}` (flat or nested)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Address {
    street: String,
    postcode: String,
    city: String,
    #[serde(rename = "type")]
    kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct ContactDetail {
    address: Address,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Accommodation {
    name: String,
    #[serde(rename = "type")]
    kind: String,
    #[serde(rename = "contactDetails", skip_serializing_if = "Option::is_none")]
    contact_details: Option<Vec<ContactDetail>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    city: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    postcode: Option<String>,
}

const KINDS: &[&str] = &["SkiResort", "Hotel", "Apartment", "Guesthouse", "Campground"];
const CITIES: &[&str] = &["Seefeld", "Innsbruck", "Mayrhofen", "Kitzbuehel", "Soelden", "Ischgl"];
const STREETS: &[&str] = &["Dorfplatz", "Gschwandtkopf", "Kirchweg", "Bahnhofstrasse", "Sonnenweg"];
const ADDRESS_KINDS: &[&str] = &["Office", "Lifte", "Reception", "Billing"];

fn accommodations(n: usize, nesting: Nesting, seed: u64) -> Vec<Accommodation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |items: &[&str], rng: &mut ChaCha8Rng| items[rng.random_range(0..items.len())].to_owned();
    (0..n)
        .map(|i| {
            let kind = pick(KINDS, &mut rng);
            let name = format!("{kind} {i}");
            match nesting {
                Nesting::Flat => Accommodation {
                    name,
                    kind,
                    contact_details: None,
                    city: Some(pick(CITIES, &mut rng)),
                    postcode: Some(format!("{}", rng.random_range(1000..10000))),
                },
                Nesting::Nested => {
                    let count = rng.random_range(1..=3);
                    let details = (0..count)
                        .map(|k| ContactDetail {
                            address: Address {
                                street: format!("{} {}-{k}", pick(STREETS, &mut rng), i),
                                postcode: format!("{}", rng.random_range(1000..10000)),
                                city: pick(CITIES, &mut rng),
                                kind: pick(ADDRESS_KINDS, &mut rng),
                            },
                        })
                        .collect();
                    Accommodation {
                        name,
                        kind,
                        contact_details: Some(details),
                        city: None,
                        postcode: None,
                    }
                }
            }
        })
        .collect()
}

/// File name of a generated corpus.
pub fn corpus_file_name(n: usize, format: SourceFormat, nesting: Nesting) -> String {
    let ext = match format {
        SourceFormat::Json => "json",
        SourceFormat::Xml => "xml",
    };
    format!("accommodations-{nesting}-{n}.{ext}")
}

/// Writes `n` seeded accommodation objects to `dir` and returns the file
/// path. JSON and XML files for the same `n`, nesting and seed carry the same
/// data.
pub fn generate_corpus(
    dir: impl AsRef<Path>,
    n: usize,
    format: SourceFormat,
    nesting: Nesting,
    seed: u64,
) -> Result<PathBuf, BenchError> {
    if n == 0 {
        return Err(BenchError::EmptyCorpus);
    }
    let items = accommodations(n, nesting, seed);
    let path = dir.as_ref().join(corpus_file_name(n, format, nesting));
    let file = std::fs::File::create(&path).map_err(|e| BenchError::io(&path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let written = match format {
        SourceFormat::Json => serde_json::to_writer_pretty(&mut out, &items).map_err(std::io::Error::from),
        SourceFormat::Xml => write_xml(&mut out, &items),
    };
    written.and_then(|_| out.flush()).map_err(|e| BenchError::io(&path, e))?;
    Ok(path)
}

fn write_xml(out: &mut impl Write, items: &[Accommodation]) -> std::io::Result<()> {
    fn field(out: &mut impl Write, indent: &str, name: &str, value: &str) -> std::io::Result<()> {
        writeln!(out, "{indent}<{name}>{}</{name}>", escape(value))
    }
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>")?;
    writeln!(out, "<accommodations>")?;
    for a in items {
        writeln!(out, "  <accommodation>")?;
        field(out, "    ", "name", &a.name)?;
        field(out, "    ", "type", &a.kind)?;
        if let Some(details) = &a.contact_details {
            writeln!(out, "    <contactDetails>")?;
            for d in details {
                writeln!(out, "      <contactDetail>")?;
                writeln!(out, "        <address>")?;
                field(out, "          ", "street", &d.address.street)?;
                field(out, "          ", "postcode", &d.address.postcode)?;
                field(out, "          ", "city", &d.address.city)?;
                field(out, "          ", "type", &d.address.kind)?;
                writeln!(out, "        </address>")?;
                writeln!(out, "      </contactDetail>")?;
            }
            writeln!(out, "    </contactDetails>")?;
        }
        if let Some(city) = &a.city {
            field(out, "    ", "city", city)?;
        }
        if let Some(postcode) = &a.postcode {
            field(out, "    ", "postcode", postcode)?;
        }
        writeln!(out, "  </accommodation>")?;
    }
    writeln!(out, "</accommodations>")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Mapping for a generated corpus, reading `source`.
pub fn corpus_mapping(format: SourceFormat, nesting: Nesting, source: &str) -> String {
    let (formulation, resort_it, address_it) = match format {
        SourceFormat::Json => ("ql:JSONPath", "$.*", "$.*.contactDetails.*.address"),
        SourceFormat::Xml => (
            "ql:XPath",
            "/accommodations/accommodation",
            "/accommodations/accommodation/contactDetails/contactDetail/address",
        ),
    };
    let logical = |it: &str| {
        format!(
            "rml:logicalSource [ rml:source \"{source}\"; rml:referenceFormulation {formulation}; rml:iterator \"{it}\" ]"
        )
    };
    let mut m = String::from(
        "@prefix rr: <http://www.w3.org/ns/r2rml#> .
@prefix rml: <http://semweb.mmlab.be/ns/rml#> .
@prefix ql: <http://semweb.mmlab.be/ns/ql#> .
@prefix schema: <http://schema.org/> .
@prefix ex: <http://example.com/mapping/> .

",
    );
    m.push_str(&format!(
        "ex:Accommodation {};
  rr:subjectMap [ rr:template \"http://example.com/accommodation/{{name}}\"; rr:class schema:LodgingBusiness ];
  rr:predicateObjectMap [ rr:predicate schema:name; rr:objectMap [ rml:reference \"name\" ] ];
  rr:predicateObjectMap [ rr:predicate schema:additionalType; rr:objectMap [ rml:reference \"type\" ] ]",
        logical(resort_it)
    ));
    match nesting {
        Nesting::Flat => m.push_str(
            ";
  rr:predicateObjectMap [ rr:predicate schema:addressLocality; rr:objectMap [ rml:reference \"city\" ] ];
  rr:predicateObjectMap [ rr:predicate schema:postalCode; rr:objectMap [ rml:reference \"postcode\" ] ] .
",
        ),
        Nesting::Nested => m.push_str(&format!(
            ";
  rr:predicateObjectMap [ rr:predicate schema:address; rr:objectMap [ rr:parentTriplesMap ex:Address ] ] .

ex:Address {};
  rr:subjectMap [ rr:template \"http://example.com/address/{{street}}\"; rr:class schema:PostalAddress ];
  rr:predicateObjectMap [ rr:predicate schema:streetAddress; rr:objectMap [ rml:reference \"street\" ] ];
  rr:predicateObjectMap [ rr:predicate schema:postalCode; rr:objectMap [ rml:reference \"postcode\" ] ];
  rr:predicateObjectMap [ rr:predicate schema:addressLocality; rr:objectMap [ rml:reference \"city\" ] ];
  rr:predicateObjectMap [ rr:predicate schema:contactType; rr:objectMap [ rml:reference \"type\" ] ] .
",
            logical(address_it)
        )),
    }
    m
}

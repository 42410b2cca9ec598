//! IRIs of the vocabularies understood by the mapping parser.

pub mod rdf {
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}

pub mod xsd {
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
}

pub mod rr {
    pub const NS: &str = "http://www.w3.org/ns/r2rml#";
    pub const TRIPLES_MAP: &str = "http://www.w3.org/ns/r2rml#TriplesMap";
    pub const LOGICAL_TABLE: &str = "http://www.w3.org/ns/r2rml#logicalTable";
    pub const SUBJECT_MAP: &str = "http://www.w3.org/ns/r2rml#subjectMap";
    pub const SUBJECT: &str = "http://www.w3.org/ns/r2rml#subject";
    pub const PREDICATE_OBJECT_MAP: &str = "http://www.w3.org/ns/r2rml#predicateObjectMap";
    pub const PREDICATE_MAP: &str = "http://www.w3.org/ns/r2rml#predicateMap";
    pub const PREDICATE: &str = "http://www.w3.org/ns/r2rml#predicate";
    pub const OBJECT_MAP: &str = "http://www.w3.org/ns/r2rml#objectMap";
    pub const OBJECT: &str = "http://www.w3.org/ns/r2rml#object";
    pub const GRAPH_MAP: &str = "http://www.w3.org/ns/r2rml#graphMap";
    pub const GRAPH: &str = "http://www.w3.org/ns/r2rml#graph";
    pub const DEFAULT_GRAPH: &str = "http://www.w3.org/ns/r2rml#defaultGraph";
    pub const CLASS: &str = "http://www.w3.org/ns/r2rml#class";
    pub const CONSTANT: &str = "http://www.w3.org/ns/r2rml#constant";
    pub const TEMPLATE: &str = "http://www.w3.org/ns/r2rml#template";
    pub const COLUMN: &str = "http://www.w3.org/ns/r2rml#column";
    pub const TERM_TYPE: &str = "http://www.w3.org/ns/r2rml#termType";
    pub const IRI: &str = "http://www.w3.org/ns/r2rml#IRI";
    pub const BLANK_NODE: &str = "http://www.w3.org/ns/r2rml#BlankNode";
    pub const LITERAL: &str = "http://www.w3.org/ns/r2rml#Literal";
    pub const DATATYPE: &str = "http://www.w3.org/ns/r2rml#datatype";
    pub const LANGUAGE: &str = "http://www.w3.org/ns/r2rml#language";
    pub const PARENT_TRIPLES_MAP: &str = "http://www.w3.org/ns/r2rml#parentTriplesMap";
    pub const JOIN_CONDITION: &str = "http://www.w3.org/ns/r2rml#joinCondition";
    pub const CHILD: &str = "http://www.w3.org/ns/r2rml#child";
    pub const PARENT: &str = "http://www.w3.org/ns/r2rml#parent";
}

pub mod rml {
    pub const LOGICAL_SOURCE: &str = "http://semweb.mmlab.be/ns/rml#logicalSource";
    pub const SOURCE: &str = "http://semweb.mmlab.be/ns/rml#source";
    pub const REFERENCE_FORMULATION: &str = "http://semweb.mmlab.be/ns/rml#referenceFormulation";
    pub const ITERATOR: &str = "http://semweb.mmlab.be/ns/rml#iterator";
    pub const REFERENCE: &str = "http://semweb.mmlab.be/ns/rml#reference";
}

pub mod ql {
    pub const NS: &str = "http://semweb.mmlab.be/ns/ql#";
    pub const JSON_PATH: &str = "http://semweb.mmlab.be/ns/ql#JSONPath";
    pub const XPATH: &str = "http://semweb.mmlab.be/ns/ql#XPath";
}

pub mod fnml {
    pub const FUNCTION_VALUE: &str = "http://semweb.mmlab.be/ns/fnml#functionValue";
}

pub mod fno {
    pub const EXECUTES: &str = "https://w3id.org/function/ontology#executes";
    /// Older spelling still found in published mappings.
    pub const EXECUTES_LEGACY: &str = "http://w3id.org/function/ontology#executes";
}

pub mod grel {
    pub const NS: &str = "http://users.ugent.be/~bjdmeest/function/grel.ttl#";
    pub const VALUE_PARAMETER: &str = "http://users.ugent.be/~bjdmeest/function/grel.ttl#valueParameter";
    pub const TO_UPPER_CASE: &str = "http://users.ugent.be/~bjdmeest/function/grel.ttl#toUpperCase";
    pub const TO_LOWER_CASE: &str = "http://users.ugent.be/~bjdmeest/function/grel.ttl#toLowerCase";
    pub const STRING_TRIM: &str = "http://users.ugent.be/~bjdmeest/function/grel.ttl#string_trim";
}

//! OAI-PMH `ListRecords` / `GetRecord` responses with `oai_dc` payloads.

use chrono::NaiveDate;
use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::quadstore::is_absolute_iri;
use crate::timestamp;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DcRecord {
    pub identifier: String,
    pub datestamp: Option<NaiveDate>,
    pub title: String,
    /// Authorship order as it appears in the record.
    pub creators: Vec<String>,
    pub subjects: Vec<String>,
    pub description: String,
    pub date: Option<NaiveDate>,
    pub type_tag: Option<String>,
    pub url: Option<String>,
}

#[derive(Default)]
struct Pending {
    record: DcRecord,
    deleted: bool,
}

/// Parses every `<record>` in the document. Records without a header
/// identifier, and deleted records, are skipped with a warning.
pub fn parse_oaipmh(xml: &[u8]) -> Result<Vec<DcRecord>, IngestError> {
    let mut reader = Reader::from_reader(xml);
    reader.config_mut().check_end_names = true;
    let mut buf = Vec::new();
    let mut path: Vec<String> = Vec::new();
    let mut text = String::new();
    let mut current: Option<Pending> = None;
    let mut records = Vec::new();

    loop {
        let event = reader.read_event_into(&mut buf).map_err(|e| IngestError::Xml {
            offset: reader.error_position(),
            message: e.to_string(),
        })?;
        match event {
            Event::Start(e) => {
                let name = String::from_utf8_lossy(e.local_name().as_ref()).into_owned();
                if name == "record" {
                    current = Some(Pending::default());
                } else if name == "header" {
                    let deleted = e.attributes().flatten().any(|a| {
                        a.key.local_name().as_ref() == b"status" && a.value.as_ref() == b"deleted"
                    });
                    if let Some(p) = current.as_mut() {
                        p.deleted |= deleted;
                    }
                }
                path.push(name);
                text.clear();
            }
            Event::Empty(_) => {}
            Event::Text(t) => {
                let chunk = t.unescape().map_err(|e| IngestError::Xml {
                    offset: reader.buffer_position(),
                    message: e.to_string(),
                })?;
                text.push_str(&chunk);
            }
            Event::CData(t) => text.push_str(&String::from_utf8_lossy(&t)),
            Event::End(_) => {
                let name = path.pop().unwrap_or_default();
                if let Some(pending) = current.as_mut() {
                    let in_header = path.iter().any(|p| p == "header");
                    let in_metadata = path.iter().any(|p| p == "metadata");
                    assign(&mut pending.record, &name, &text, in_header, in_metadata);
                }
                text.clear();
                if name == "record" {
                    if let Some(pending) = current.take() {
                        if pending.record.identifier.is_empty() {
                            log::warn!("skipping OAI record without identifier");
                        } else if pending.deleted {
                            log::warn!("skipping deleted OAI record {}", pending.record.identifier);
                        } else {
                            records.push(pending.record);
                        }
                    }
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if let Some(open) = path.last() {
        return Err(IngestError::Xml {
            offset: reader.buffer_position(),
            message: format!("unexpected end of document inside <{open}>"),
        });
    }
    Ok(records)
}

fn assign(record: &mut DcRecord, element: &str, raw: &str, in_header: bool, in_metadata: bool) {
    let value = collapse_ws(raw);
    if in_header {
        match element {
            "identifier" => record.identifier = value,
            "datestamp" => record.datestamp = parse_date(&value),
            _ => {}
        }
        return;
    }
    if !in_metadata || value.is_empty() {
        return;
    }
    match element {
        "title" if record.title.is_empty() => record.title = value,
        "creator" => record.creators.push(value),
        "subject" => record.subjects.push(value),
        "description" if record.description.is_empty() => record.description = value,
        "date" if record.date.is_none() => record.date = parse_date(&value),
        "type" if record.type_tag.is_none() => record.type_tag = Some(value),
        "identifier" if record.url.is_none() => {
            // URLs cannot contain whitespace; harvested ones are sometimes wrapped.
            let candidate: String = raw.split_whitespace().collect();
            if is_absolute_iri(&candidate) {
                record.url = Some(candidate);
            }
        }
        _ => {}
    }
}

fn parse_date(value: &str) -> Option<NaiveDate> {
    timestamp::parse(value).map(|ts| ts.date_naive())
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

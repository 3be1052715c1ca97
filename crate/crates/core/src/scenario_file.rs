//! Line-delimited JSON scenario files.
//!
//! Each non-blank line is one object tagged with `"kind"`:
//!
//! ```text
//! {"kind":"host","id":0,"capacity":{"cores":4,"mips_per_core":2660.0,"ram":8192.0,"net_bw":10000.0,"storage":1000.0,"io":0.0},"power":{"idle_watts":93.7,"max_watts":135.0}}
//! {"kind":"vm","id":1,"vm_type":1,"demand":{"cores":2,"mips_per_core":2500.0,"ram":871.0,"net_bw":100.0,"storage":5.0},"start_time":0,"duration":3600}
//! ```
//!
//! `vm_type` is a catalog index 1..=4 or `"custom"`; `io` may be omitted and
//! defaults to 0 (on a host, 0 means unbounded); `power.table`, when
//! present, is a list of `[utilization, watts]` pairs. Lines starting with
//! `#` are ignored.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate_scenario, HostSpec, ModelError, Scenario, VmRequest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Record {
    Host(HostSpec),
    Vm(VmRequest),
}

#[derive(Debug, Error)]
pub enum ScenarioFileError {
    #[error("line {line}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Invalid(#[from] ModelError),
    #[error("i/o")]
    Io(#[from] std::io::Error),
}

/// Unvalidated hosts and VMs in file order.
pub fn read_records(
    reader: impl BufRead,
) -> Result<(Vec<HostSpec>, Vec<VmRequest>), ScenarioFileError> {
    let mut hosts = Vec::new();
    let mut vms = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match serde_json::from_str(trimmed).map_err(|source| ScenarioFileError::Parse {
            line: n + 1,
            source,
        })? {
            Record::Host(h) => hosts.push(h),
            Record::Vm(v) => vms.push(v),
        }
    }
    Ok((hosts, vms))
}

pub fn read_scenario(reader: impl BufRead) -> Result<Scenario, ScenarioFileError> {
    let (hosts, vms) = read_records(reader)?;
    Ok(validate_scenario(hosts, vms)?)
}

/// Writes hosts first, then VMs, one record per line.
pub fn write_records<'a>(
    mut writer: impl Write,
    hosts: impl IntoIterator<Item = &'a HostSpec>,
    vms: impl IntoIterator<Item = &'a VmRequest>,
) -> std::io::Result<()> {
    let records = hosts
        .into_iter()
        .cloned()
        .map(Record::Host)
        .chain(vms.into_iter().cloned().map(Record::Vm));
    for r in records {
        serde_json::to_writer(&mut writer, &r)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn write_scenario(writer: impl Write, scenario: &Scenario) -> std::io::Result<()> {
    write_records(writer, scenario.hosts(), scenario.vms())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{default_fleet, ml110_g5_power, six_vm_example};
    use crate::model::{VmId, VmType};

    #[test]
    fn round_trip() {
        let s = six_vm_example(3, ml110_g5_power());
        let mut buf = Vec::new();
        write_scenario(&mut buf, &s).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().count(), 9);
        let back = read_scenario(buf.as_slice()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn documented_example_parses() {
        let text = r#"
# fleet
{"kind":"host","id":0,"capacity":{"cores":4,"mips_per_core":2660.0,"ram":8192.0,"net_bw":10000.0,"storage":1000.0,"io":0.0},"power":{"idle_watts":93.7,"max_watts":135.0}}
{"kind":"vm","id":1,"vm_type":1,"demand":{"cores":2,"mips_per_core":2500.0,"ram":871.0,"net_bw":100.0,"storage":5.0},"start_time":0,"duration":3600}
{"kind":"vm","id":2,"vm_type":"custom","demand":{"cores":1,"mips_per_core":10.0,"ram":1.0,"net_bw":1.0,"storage":1.0},"start_time":5,"duration":10}
"#;
        let s = read_scenario(text.as_bytes()).unwrap();
        assert_eq!(s.hosts().len(), 1);
        assert_eq!(s.vm(VmId(1)).unwrap().vm_type, VmType::Catalog(1));
        assert_eq!(s.vm(VmId(2)).unwrap().vm_type, VmType::Custom);
        assert_eq!(s.hosts()[0].capacity, default_fleet(1)[0].capacity);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "{\"kind\":\"vm\"}\n";
        match read_scenario(format!("\n{text}").as_bytes()) {
            Err(ScenarioFileError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let bad_kind = r#"{"kind":"rack","id":0}"#;
        assert!(read_records(bad_kind.as_bytes()).is_err());
    }

    #[test]
    fn validation_errors_surface() {
        let s = six_vm_example(1, ml110_g5_power());
        let mut hosts = s.hosts().to_vec();
        let mut other = hosts[0].clone();
        other.id = crate::model::HostId(7);
        other.capacity.cores += 1;
        hosts.push(other);
        let mut buf = Vec::new();
        write_records(&mut buf, &hosts, s.vms()).unwrap();
        assert!(matches!(
            read_scenario(buf.as_slice()),
            Err(ScenarioFileError::Invalid(ModelError::HeterogeneousFleet(
                ..
            )))
        ));
    }
}

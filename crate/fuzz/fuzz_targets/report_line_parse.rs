#![no_main]

use libfuzzer_sys::fuzz_target;

use cutlink_harness::{parse_report_line, ReportLine};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    match parse_report_line(s) {
        Ok(ReportLine::Violation(v)) => {
            let _ = v.report.graph();
            let line = serde_json::to_string(&v).expect("serializes");
            assert_eq!(parse_report_line(&line).ok(), Some(ReportLine::Violation(v)));
        }
        Ok(ReportLine::Summary(_)) | Err(_) => {}
    }
});

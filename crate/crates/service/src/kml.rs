use std::fmt::Write;

use firewx_core::domain::{slot_duration, MajorClass, SubLevel};
use firewx_core::FwiClass;

use crate::FwiResponse;

/// Display colour of a class as RGB. Each major class has a base hue; the
/// lower sub-level is lighter and the upper one darker.
pub fn class_color(class: FwiClass) -> [u8; 3] {
    let base: [u8; 3] = match class.major() {
        MajorClass::Low => [76, 175, 80],
        MajorClass::Moderate => [33, 150, 243],
        MajorClass::High => [253, 216, 53],
        MajorClass::VeryHigh => [251, 140, 0],
        MajorClass::Extreme => [211, 47, 47],
    };
    base.map(|c| {
        let c = f64::from(c);
        let v = match class.sub() {
            SubLevel::Min => c + (255.0 - c) * 0.4,
            SubLevel::Mid => c,
            SubLevel::Max => c * 0.7,
        };
        v.round() as u8
    })
}

fn fmt_time(t: firewx_core::Timestamp) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// KML document with one folder per frame and one filled polygon per cell.
/// Gap frames become empty folders so the timeline keeps its length.
pub fn kml_document(resp: &FwiResponse) -> String {
    let mut out = String::with_capacity(1024 + resp.frames.len() * resp.nx * resp.ny * 256);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<kml xmlns=\"http://www.opengis.net/kml/2.2\">\n<Document>\n");
    writeln!(out, "<name>Fire weather index {} to {}</name>", fmt_time(resp.from), fmt_time(resp.to)).unwrap();
    for class in FwiClass::all() {
        let [r, g, b] = class_color(class);
        writeln!(
            out,
            "<Style id=\"c{}\"><LineStyle><width>0</width></LineStyle><PolyStyle><color>b0{b:02x}{g:02x}{r:02x}</color><outline>0</outline></PolyStyle></Style>",
            class.ordinal()
        )
        .unwrap();
    }
    for frame in &resp.frames {
        let begin = fmt_time(frame.timestamp);
        let end = fmt_time(frame.timestamp + slot_duration() * resp.stride as i32);
        let name = if frame.gap { format!("{begin} (no data)") } else { begin.clone() };
        writeln!(out, "<Folder><name>{name}</name><TimeSpan><begin>{begin}</begin><end>{end}</end></TimeSpan>").unwrap();
        let b = frame.bbox;
        let dlat = (b.north - b.south) / frame.ny as f64;
        let dlon = (b.east - b.west) / frame.nx as f64;
        for (i, label) in frame.labels.iter().enumerate() {
            let (row, col) = (i / frame.nx, i % frame.nx);
            let north = b.north - row as f64 * dlat;
            let south = north - dlat;
            let west = b.west + col as f64 * dlon;
            let east = west + dlon;
            writeln!(
                out,
                "<Placemark><name>{}</name><styleUrl>#c{}</styleUrl><Polygon><outerBoundaryIs><LinearRing><coordinates>{west},{north},0 {east},{north},0 {east},{south},0 {west},{south},0 {west},{north},0</coordinates></LinearRing></outerBoundaryIs></Polygon></Placemark>",
                label.label(),
                label.ordinal()
            )
            .unwrap();
        }
        out.push_str("</Folder>\n");
    }
    out.push_str("</Document>\n</kml>\n");
    out
}

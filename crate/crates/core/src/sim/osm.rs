//! OSM XML extraction: drivable ways projected to local meters.

use crate::error::{CoreError, Result};
use quick_xml::events::Event;
use quick_xml::Reader;
use std::collections::HashMap;
use std::path::Path;

const EARTH_RADIUS_M: f64 = 6_371_000.0;
/// Operating-range cap for road speeds, m/s.
const SPEED_CAP: f64 = 20.0;

/// One drivable polyline in local meters.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadSegment {
    pub points: Vec<(f64, f64)>,
    pub speed_mps: f64,
    pub class: String,
}

/// Projected road network within a bounding region; the origin sits at the
/// region's south-west corner.
#[derive(Debug, Clone)]
pub struct RoadNetwork {
    pub segments: Vec<RoadSegment>,
    pub width_m: f64,
    pub height_m: f64,
}

impl RoadNetwork {
    pub fn total_length_m(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| {
                s.points
                    .windows(2)
                    .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Default speeds by road class (m/s), capped at the operating range.
/// Used when a way carries no parseable maxspeed tag.
pub fn class_speed(class: &str) -> Option<f64> {
    let base = class.strip_suffix("_link").unwrap_or(class);
    let mps: f64 = match base {
        "motorway" => 27.8,
        "trunk" => 22.2,
        "primary" => 16.7,
        "secondary" => 13.9,
        "tertiary" => 11.1,
        "unclassified" => 8.3,
        "residential" => 8.3,
        "living_street" => 2.8,
        "service" => 5.6,
        _ => return None,
    };
    Some(mps.min(SPEED_CAP))
}

fn parse_maxspeed(value: &str) -> Option<f64> {
    let v = value.trim().to_ascii_lowercase();
    if let Some(mph) = v.strip_suffix("mph") {
        return mph.trim().parse::<f64>().ok().map(|s| (s * 0.44704).min(SPEED_CAP));
    }
    let v = v.strip_suffix("km/h").unwrap_or(&v).trim().to_string();
    v.parse::<f64>().ok().map(|kmh| (kmh / 3.6).min(SPEED_CAP))
}

pub fn parse_osm_file(path: &Path, bbox: Option<[f64; 4]>) -> Result<RoadNetwork> {
    let text = std::fs::read_to_string(path)?;
    parse_osm_str(&text, bbox).map_err(|e| match e {
        CoreError::Parse { line, message, .. } => {
            CoreError::parse(path.display().to_string(), line, message)
        }
        other => other,
    })
}

/// Parses an OSM XML extract. `bbox` is `[min_lat, min_lon, max_lat,
/// max_lon]`; nodes outside it are dropped and ways split at the gaps.
/// Without a bbox the node extent is used.
pub fn parse_osm_str(text: &str, bbox: Option<[f64; 4]>) -> Result<RoadNetwork> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    let mut nodes: HashMap<i64, (f64, f64)> = HashMap::new();
    let mut ways: Vec<(Vec<i64>, HashMap<String, String>)> = Vec::new();
    let mut current_way: Option<(Vec<i64>, HashMap<String, String>)> = None;

    let line_of = |pos: u64| {
        let upto = (pos as usize).min(text.len());
        Some(text.as_bytes()[..upto].iter().filter(|b| **b == b'\n').count() + 1)
    };

    loop {
        let event = reader.read_event();
        let pos = reader.buffer_position();
        match event {
            Err(e) => {
                return Err(CoreError::parse("osm", line_of(pos), format!("malformed XML: {e}")));
            }
            Ok(Event::Eof) => break,
            Ok(Event::Start(el)) | Ok(Event::Empty(el)) => {
                let name = el.name();
                let name = name.as_ref();
                let mut attrs: HashMap<Vec<u8>, String> = HashMap::new();
                for attr in el.attributes() {
                    let attr = attr.map_err(|e| {
                        CoreError::parse("osm", line_of(pos), format!("malformed attribute: {e}"))
                    })?;
                    attrs.insert(
                        attr.key.as_ref().to_vec(),
                        String::from_utf8_lossy(attr.value.as_ref()).into_owned(),
                    );
                }
                let get_attr = |key: &[u8]| -> Option<String> { attrs.get(key).cloned() };
                match name {
                    b"node" => {
                        let (Some(id), Some(lat), Some(lon)) =
                            (get_attr(b"id"), get_attr(b"lat"), get_attr(b"lon"))
                        else {
                            return Err(CoreError::parse("osm", line_of(pos), "node missing id/lat/lon"));
                        };
                        let id: i64 = id.parse().map_err(|_| {
                            CoreError::parse("osm", line_of(pos), format!("bad node id '{id}'"))
                        })?;
                        let lat: f64 = lat.parse().map_err(|_| {
                            CoreError::parse("osm", line_of(pos), format!("bad lat '{lat}'"))
                        })?;
                        let lon: f64 = lon.parse().map_err(|_| {
                            CoreError::parse("osm", line_of(pos), format!("bad lon '{lon}'"))
                        })?;
                        nodes.insert(id, (lat, lon));
                    }
                    b"way" => {
                        current_way = Some((Vec::new(), HashMap::new()));
                    }
                    b"nd" => {
                        if let (Some(way), Some(r)) = (current_way.as_mut(), get_attr(b"ref")) {
                            let r: i64 = r.parse().map_err(|_| {
                                CoreError::parse("osm", line_of(pos), format!("bad nd ref '{r}'"))
                            })?;
                            way.0.push(r);
                        }
                    }
                    b"tag" => {
                        if let (Some(way), Some(k), Some(v)) =
                            (current_way.as_mut(), get_attr(b"k"), get_attr(b"v"))
                        {
                            way.1.insert(k, v);
                        }
                    }
                    _ => {}
                }
            }
            Ok(Event::End(el)) => {
                if el.name().as_ref() == b"way" {
                    if let Some(way) = current_way.take() {
                        ways.push(way);
                    }
                }
            }
            Ok(_) => {}
        }
    }

    // Region: explicit bbox, else the extent of referenced nodes.
    let in_bbox = |lat: f64, lon: f64, b: &[f64; 4]| {
        lat >= b[0] && lat <= b[2] && lon >= b[1] && lon <= b[3]
    };
    let bounds = match bbox {
        Some(b) => b,
        None => {
            let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
            for (lat, lon) in nodes.values() {
                b[0] = b[0].min(*lat);
                b[1] = b[1].min(*lon);
                b[2] = b[2].max(*lat);
                b[3] = b[3].max(*lon);
            }
            if b[0] > b[2] {
                return Err(CoreError::Input("no nodes in extract".into()));
            }
            b
        }
    };
    let (lat0, lon0) = ((bounds[0] + bounds[2]) / 2.0, (bounds[1] + bounds[3]) / 2.0);
    let cos_lat = lat0.to_radians().cos();
    let project = |lat: f64, lon: f64| {
        (
            EARTH_RADIUS_M * cos_lat * (lon - lon0).to_radians(),
            EARTH_RADIUS_M * (lat - lat0).to_radians(),
        )
    };
    let (min_x, min_y) = project(bounds[0], bounds[1]);
    let (max_x, max_y) = project(bounds[2], bounds[3]);

    let mut segments = Vec::new();
    for (refs, tags) in &ways {
        let Some(class) = tags.get("highway") else { continue };
        let Some(default_speed) = class_speed(class) else { continue };
        let speed = tags
            .get("maxspeed")
            .and_then(|v| parse_maxspeed(v))
            .filter(|s| *s > 0.0)
            .unwrap_or(default_speed);

        // split the way at nodes that are missing or outside the region
        let mut run: Vec<(f64, f64)> = Vec::new();
        for r in refs {
            let inside = nodes.get(r).filter(|(lat, lon)| in_bbox(*lat, *lon, &bounds));
            match inside {
                Some((lat, lon)) => {
                    let (x, y) = project(*lat, *lon);
                    run.push((x - min_x, y - min_y));
                }
                None => {
                    if run.len() >= 2 {
                        segments.push(RoadSegment { points: std::mem::take(&mut run), speed_mps: speed, class: class.clone() });
                    } else {
                        run.clear();
                    }
                }
            }
        }
        if run.len() >= 2 {
            segments.push(RoadSegment { points: run, speed_mps: speed, class: class.clone() });
        }
    }

    if segments.is_empty() {
        return Err(CoreError::Input("no drivable ways in extract".into()));
    }
    Ok(RoadNetwork {
        segments,
        width_m: max_x - min_x,
        height_m: max_y - min_y,
    })
}

//! The shared query plan behind `analyze` and `bench`.

use std::time::Instant;

use nseg_core::analytics::{self, DegreeVector, NetworkProperties, UniqueIps};
use nseg_core::edge::{aggregate, EdgeTable};

use crate::report::QueryTimings;

/// Results and per-query wall times of one full pass.
pub struct QueryRun {
    pub properties: NetworkProperties,
    pub unique_ips: UniqueIps,
    pub link_packets: EdgeTable,
    pub packets_from_source: DegreeVector,
    pub packets_to_destination: DegreeVector,
    pub fan_out: DegreeVector,
    pub fan_in: DegreeVector,
    pub timings: QueryTimings,
}

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed().as_secs_f64())
}

/// Runs all queries. The table is aggregated once up front (that cost is
/// the `link_packets` row) and every other query runs on the aggregated
/// form, which gives identical results on either input form.
pub fn run_queries(table: &EdgeTable) -> QueryRun {
    let mut t = QueryTimings::default();
    let (agg, link_packets_s) = timed(|| aggregate(table));
    t.link_packets = link_packets_s;
    let (valid_packets, s) = timed(|| analytics::valid_packets(&agg));
    t.valid_packets = s;
    let (unique_links, s) = timed(|| analytics::unique_links(&agg));
    t.unique_links = s;
    let (max_link_packets, s) = timed(|| analytics::max_link_packets(&agg));
    t.max_link_packets = s;
    let (unique_sources, s) = timed(|| analytics::unique_sources(&agg));
    t.unique_sources = s;
    let (unique_destinations, s) = timed(|| analytics::unique_destinations(&agg));
    t.unique_destinations = s;
    let (packets_from_source, s) = timed(|| analytics::packets_from_source(&agg));
    t.packets_from_source = s;
    let (packets_to_destination, s) = timed(|| analytics::packets_to_destination(&agg));
    t.packets_to_destination = s;
    let (max_source_packets, s) = timed(|| analytics::max_source_packets(&agg));
    t.max_source_packets = s;
    let (max_destination_packets, s) = timed(|| analytics::max_destination_packets(&agg));
    t.max_destination_packets = s;
    let (fan_out, s) = timed(|| analytics::fan_out(&agg));
    t.fan_out = s;
    let (fan_in, s) = timed(|| analytics::fan_in(&agg));
    t.fan_in = s;
    let (max_fan_out, s) = timed(|| analytics::max_fan_out(&agg));
    t.max_fan_out = s;
    let (max_fan_in, s) = timed(|| analytics::max_fan_in(&agg));
    t.max_fan_in = s;
    let (unique_ips, s) = timed(|| analytics::unique_ips(&agg));
    t.unique_ips = s;

    QueryRun {
        properties: NetworkProperties {
            valid_packets,
            unique_links,
            max_link_packets,
            unique_sources,
            unique_destinations,
            max_source_packets,
            max_destination_packets,
            max_fan_out,
            max_fan_in,
        },
        unique_ips,
        link_packets: agg,
        packets_from_source,
        packets_to_destination,
        fan_out,
        fan_in,
        timings: t,
    }
}

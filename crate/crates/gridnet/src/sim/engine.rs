//! Event loop and element behaviors.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::topology::{ElementKind, Topology};

use super::queue::EventQueue;
use super::rng::{sample_truncated_exp, Purpose, Stream};
use super::stats::{NodeCounters, QueueSample, ServiceLogEntry, SimStats, SinkStats};
use super::{LoadModel, Packet, SimError, SimParams, SizeModel};

/// Synchronous round-trip to an external host for offloaded routers. The
/// virtual clock does not advance while a round-trip is in flight.
pub trait ExternalHop {
    fn roundtrip(
        &mut self,
        node_entity: &str,
        src_entity: &str,
        pkt: &Packet,
    ) -> std::io::Result<Packet>;
}

/// Draws a branch index for the given probabilities.
pub fn brancher_route(probs: &[f64], rng: &mut Stream) -> Result<usize, SimError> {
    let sum: f64 = probs.iter().sum();
    if probs.is_empty() || (sum - 1.0).abs() > 1e-9 {
        return Err(SimError::BadDistribution(sum));
    }
    let u = rng.unit();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Ok(i);
        }
    }
    Ok(probs.len() - 1)
}

#[derive(Debug)]
enum Event {
    Generate { elem: u32 },
    Arrive { elem: u32, pkt: Packet },
    ServiceDone { elem: u32 },
    MonitorSample { slot: u32 },
    ServiceLog { slot: u32 },
}

enum Arrival {
    TruncExp { mean: f64, cap: Option<f64> },
    Fixed { interval: f64 },
}

enum Size {
    Exp { mean: f64 },
    Fixed { bytes: u64 },
}

struct GenState {
    out: u32,
    entity_idx: u32,
    flow: u32,
    seq: u64,
    remaining: Option<u64>,
    interarrival: Arrival,
    size: Size,
    arrival_rng: Stream,
    size_rng: Stream,
}

struct RouterState {
    out: Option<u32>,
    queue: VecDeque<(Packet, f64)>,
    queued_bytes: u64,
    in_service: Option<Packet>,
    port_rate: f64,
    forward_prob: f64,
    capacity: Option<u64>,
    service_rng: Stream,
    forward_rng: Stream,
}

struct BrancherState {
    outs: Vec<u32>,
    probs: Vec<f64>,
    rng: Stream,
}

struct SinkState {
    received: u64,
    last_arrival: Option<f64>,
    delays: Vec<f64>,
    interarrivals: Vec<f64>,
}

enum Elem {
    Generator(GenState),
    Router(RouterState),
    Brancher(BrancherState),
    Sink(SinkState),
    Monitor,
}

struct Engine<'a> {
    topo: &'a Topology,
    params: &'a SimParams,
    until: f64,
    heap: EventQueue<Event>,
    elems: Vec<Elem>,
    counters: Vec<NodeCounters>,
    entity_ids: Vec<String>,
    generated_by_entity: Vec<u64>,
    delivered_by_entity: Vec<u64>,
    /// One slot per topology monitor: (router elem, samples).
    queue_samples: Vec<(u32, Vec<QueueSample>)>,
    service_log: Vec<(u32, Vec<ServiceLogEntry>)>,
    monitor_rngs: Vec<Stream>,
    now: f64,
    events: u64,
    /// Packets created but not yet absorbed by a sink or a drop.
    active_packets: u64,
    /// Generators that may still emit.
    open_generators: u64,
    external: Vec<bool>,
    hop: Option<&'a mut dyn ExternalHop>,
}

impl<'a> Engine<'a> {
    fn new(
        topo: &'a Topology,
        params: &'a SimParams,
        until: f64,
        external: Option<(&BTreeSet<String>, &'a mut dyn ExternalHop)>,
    ) -> Result<Self, SimError> {
        params.validate()?;
        if !(until >= 0.0) {
            return Err(SimError::InvalidParams("until must be nonnegative".into()));
        }

        let mut entity_ids: Vec<String> = Vec::new();
        let mut entity_index: BTreeMap<&str, u32> = BTreeMap::new();
        for n in topo.nodes() {
            if !entity_index.contains_key(n.entity.as_str()) {
                entity_index.insert(n.entity.as_str(), entity_ids.len() as u32);
                entity_ids.push(n.entity.clone());
            }
        }

        let utilities = topo.utilities();
        let flow_of_entity: BTreeMap<&str, u32> = utilities
            .iter()
            .enumerate()
            .map(|(i, u)| (u.as_str(), i as u32))
            .collect();

        // fixed-count budgets split round-robin over id-sorted generators
        let mut fixed_budget: BTreeMap<u32, u64> = BTreeMap::new();
        if let LoadModel::FixedCount { total, .. } = params.load {
            let mut gens: Vec<u32> = topo
                .nodes()
                .iter()
                .enumerate()
                .filter(|(_, n)| n.kind == ElementKind::Generator)
                .map(|(i, _)| i as u32)
                .collect();
            gens.sort_by(|&a, &b| topo.node(a).id.cmp(&topo.node(b).id));
            let g = gens.len() as u64;
            for (i, idx) in gens.iter().enumerate() {
                let share = total / g + u64::from((i as u64) < total % g);
                fixed_budget.insert(*idx, share);
            }
        }

        let seed = params.seed;
        let mut elems = Vec::with_capacity(topo.node_count());
        let mut open_generators = 0u64;
        for (i, n) in topo.nodes().iter().enumerate() {
            let over = params.node_overrides.get(&n.id);
            let elem = match n.kind {
                ElementKind::Generator => {
                    let out = topo.out(i as u32)[0];
                    let interarrival = match params.load {
                        LoadModel::Exponential => {
                            let cap = match over.and_then(|o| o.interarrival_cap.as_ref()) {
                                Some(c) => *c,
                                None => Some(params.interarrival_cap),
                            };
                            let mean = over
                                .and_then(|o| o.interarrival_mean)
                                .unwrap_or(params.interarrival_cap);
                            Arrival::TruncExp { mean, cap }
                        }
                        LoadModel::FixedCount { interval, .. } => Arrival::Fixed { interval },
                    };
                    let size = match params.size_model {
                        SizeModel::Fixed(bytes) => Size::Fixed { bytes },
                        SizeModel::Exponential => Size::Exp {
                            mean: over
                                .and_then(|o| o.mean_size)
                                .unwrap_or(params.mean_packet_size),
                        },
                    };
                    let remaining = match params.load {
                        LoadModel::FixedCount { .. } => Some(fixed_budget[&(i as u32)]),
                        LoadModel::Exponential => over.and_then(|o| o.budget),
                    };
                    if remaining != Some(0) {
                        open_generators += 1;
                    }
                    let flow = topo
                        .utility_of()
                        .get(&n.entity)
                        .and_then(|u| flow_of_entity.get(u.as_str()))
                        .copied()
                        .unwrap_or(0);
                    Elem::Generator(GenState {
                        out,
                        entity_idx: entity_index[n.entity.as_str()],
                        flow,
                        seq: 0,
                        remaining,
                        interarrival,
                        size,
                        arrival_rng: Stream::element(seed, &n.id, Purpose::Interarrival),
                        size_rng: Stream::element(seed, &n.id, Purpose::Size),
                    })
                }
                ElementKind::Router => {
                    let out = topo
                        .out(i as u32)
                        .iter()
                        .copied()
                        .find(|&t| topo.node(t).kind != ElementKind::Monitor);
                    Elem::Router(RouterState {
                        out,
                        queue: VecDeque::new(),
                        queued_bytes: 0,
                        in_service: None,
                        port_rate: over.and_then(|o| o.port_rate).unwrap_or(params.port_rate),
                        forward_prob: over
                            .and_then(|o| o.forward_prob)
                            .unwrap_or(params.forward_prob),
                        capacity: match over.and_then(|o| o.queue_capacity.as_ref()) {
                            Some(c) => *c,
                            None => params.queue_capacity,
                        },
                        service_rng: Stream::element(seed, &n.id, Purpose::Service),
                        forward_rng: Stream::element(seed, &n.id, Purpose::Forward),
                    })
                }
                ElementKind::Brancher => {
                    let outs: Vec<u32> = topo.out(i as u32).to_vec();
                    debug_assert!(!outs.is_empty());
                    let probs = vec![1.0 / outs.len() as f64; outs.len()];
                    Elem::Brancher(BrancherState {
                        outs,
                        probs,
                        rng: Stream::element(seed, &n.id, Purpose::Branch),
                    })
                }
                ElementKind::Sink => Elem::Sink(SinkState {
                    received: 0,
                    last_arrival: None,
                    delays: Vec::new(),
                    interarrivals: Vec::new(),
                }),
                ElementKind::Monitor => Elem::Monitor,
            };
            elems.push(elem);
        }

        if !until.is_finite() {
            let unbounded = elems.iter().any(|e| match e {
                Elem::Generator(g) => g.remaining.is_none(),
                _ => false,
            });
            if unbounded {
                return Err(SimError::InvalidParams(
                    "infinite horizon requires budgeted generators".into(),
                ));
            }
        }

        let mut external_mask = vec![false; topo.node_count()];
        let hop = match external {
            Some((entities, hop)) => {
                for (i, n) in topo.nodes().iter().enumerate() {
                    if n.kind == ElementKind::Router && entities.contains(&n.entity) {
                        external_mask[i] = true;
                    }
                }
                Some(hop)
            }
            None => None,
        };

        let counters = vec![NodeCounters::default(); topo.node_count()];
        let queue_samples = topo.monitors().iter().map(|&(_, r)| (r, Vec::new())).collect();
        let service_log = topo.monitors().iter().map(|&(_, r)| (r, Vec::new())).collect();
        let monitor_rngs = topo
            .monitors()
            .iter()
            .map(|&(m, _)| Stream::element(seed, &topo.node(m).id, Purpose::Monitor))
            .collect();
        let generated_by_entity = vec![0u64; entity_ids.len()];
        let delivered_by_entity = vec![0u64; entity_ids.len()];

        Ok(Engine {
            topo,
            params,
            until,
            heap: EventQueue::new(),
            elems,
            counters,
            entity_ids,
            generated_by_entity,
            delivered_by_entity,
            queue_samples,
            service_log,
            monitor_rngs,
            now: 0.0,
            events: 0,
            active_packets: 0,
            open_generators,
            external: external_mask,
            hop,
        })
    }

    fn schedule(&mut self, time: f64, ev: Event) {
        if time <= self.until {
            self.heap.push(time, ev);
        }
    }

    fn prime(&mut self) {
        for i in 0..self.elems.len() {
            if let Elem::Generator(g) = &mut self.elems[i] {
                if g.remaining == Some(0) {
                    continue;
                }
                let gap = match &g.interarrival {
                    Arrival::TruncExp { mean, cap } => {
                        sample_truncated_exp(*mean, *cap, &mut g.arrival_rng)
                    }
                    Arrival::Fixed { interval } => *interval,
                };
                let ev = Event::Generate { elem: i as u32 };
                if gap <= self.until {
                    self.heap.push(gap, ev);
                } else {
                    self.open_generators -= 1;
                }
            }
        }
        let mean = 1.0 / self.params.monitor_cap;
        for slot in 0..self.monitor_rngs.len() {
            let gap = sample_truncated_exp(mean, Some(mean), &mut self.monitor_rngs[slot]);
            self.schedule(gap, Event::MonitorSample { slot: slot as u32 });
        }
        for slot in 0..self.service_log.len() {
            self.schedule(
                self.params.service_log_interval,
                Event::ServiceLog { slot: slot as u32 },
            );
        }
    }

    fn start_service(&mut self, elem: u32) {
        let service_time = {
            let Elem::Router(r) = &mut self.elems[elem as usize] else { unreachable!() };
            debug_assert!(r.in_service.is_none());
            let Some((pkt, enqueued_at)) = r.queue.pop_front() else { return };
            r.queued_bytes -= pkt.size;
            let c = &mut self.counters[elem as usize];
            c.sum_wait += self.now - enqueued_at;
            c.processed += 1;
            let scale = pkt.size as f64 / self.params.mean_packet_size;
            let service = r.service_rng.exp(1.0 / r.port_rate) * scale;
            r.in_service = Some(pkt);
            service
        };
        self.heap.push(self.now + service_time, Event::ServiceDone { elem });
    }

    fn absorb(&mut self) {
        debug_assert!(self.active_packets > 0);
        self.active_packets -= 1;
    }

    /// Accepts a packet into a router queue, dropping on byte overflow.
    fn router_accept(&mut self, elem: u32, pkt: Packet) {
        let accepted = {
            let Elem::Router(r) = &mut self.elems[elem as usize] else { unreachable!() };
            match r.capacity {
                Some(cap) if r.queued_bytes + pkt.size > cap => false,
                _ => {
                    r.queue.push_back((pkt, self.now));
                    r.queued_bytes += pkt.size;
                    true
                }
            }
        };
        if accepted {
            let idle = {
                let Elem::Router(r) = &self.elems[elem as usize] else { unreachable!() };
                r.in_service.is_none()
            };
            if idle {
                self.start_service(elem);
            }
        } else {
            self.counters[elem as usize].packets_dropped += 1;
            self.absorb();
        }
    }

    fn arrive(&mut self, elem: u32, pkt: Packet) -> Result<(), SimError> {
        match self.topo.node(elem).kind {
            ElementKind::Router => {
                self.counters[elem as usize].packets_in += 1;
                let pkt = if self.external[elem as usize] {
                    let node_entity = self.topo.node(elem).entity.clone();
                    let src_entity = self.entity_ids[pkt.src as usize].clone();
                    let hop = self.hop.as_mut().expect("external mask implies a hop");
                    match hop.roundtrip(&node_entity, &src_entity, &pkt) {
                        Ok(back) => back,
                        Err(e) => {
                            return Err(SimError::TransitFailed {
                                node: node_entity,
                                source: e,
                                partial: Box::new(self.finalize()),
                            })
                        }
                    }
                } else {
                    pkt
                };
                self.router_accept(elem, pkt);
                Ok(())
            }
            ElementKind::Brancher => {
                self.counters[elem as usize].packets_in += 1;
                self.counters[elem as usize].packets_out += 1;
                let target = {
                    let Elem::Brancher(b) = &mut self.elems[elem as usize] else { unreachable!() };
                    let probs = std::mem::take(&mut b.probs);
                    let idx = brancher_route(&probs, &mut b.rng)?;
                    b.probs = probs;
                    b.outs[idx]
                };
                self.heap.push(self.now, Event::Arrive { elem: target, pkt });
                Ok(())
            }
            ElementKind::Sink => {
                self.counters[elem as usize].packets_in += 1;
                {
                    let Elem::Sink(s) = &mut self.elems[elem as usize] else { unreachable!() };
                    s.received += 1;
                    let delay = self.now - pkt.created_at_us as f64 * 1e-6;
                    s.delays.push(delay);
                    if let Some(last) = s.last_arrival {
                        s.interarrivals.push(self.now - last);
                    }
                    s.last_arrival = Some(self.now);
                }
                self.delivered_by_entity[pkt.src as usize] += 1;
                self.absorb();
                Ok(())
            }
            ElementKind::Generator | ElementKind::Monitor => Err(SimError::UnknownNode(format!(
                "packet routed into non-forwarding element {}",
                self.topo.node(elem).id
            ))),
        }
    }

    fn handle(&mut self, ev: Event) -> Result<(), SimError> {
        match ev {
            Event::Generate { elem } => {
                let (pkt, out, gap) = {
                    let Elem::Generator(g) = &mut self.elems[elem as usize] else {
                        unreachable!()
                    };
                    let size = match &g.size {
                        Size::Exp { mean } => g.size_rng.exp(*mean).round().max(1.0) as u64,
                        Size::Fixed { bytes } => *bytes,
                    };
                    let pkt = Packet {
                        seq: g.seq,
                        created_at_us: (self.now * 1e6).floor() as u64,
                        size,
                        src: g.entity_idx,
                        flow: g.flow,
                    };
                    g.seq += 1;
                    if let Some(rem) = &mut g.remaining {
                        *rem -= 1;
                    }
                    let gap = if g.remaining == Some(0) {
                        None
                    } else {
                        Some(match &g.interarrival {
                            Arrival::TruncExp { mean, cap } => {
                                sample_truncated_exp(*mean, *cap, &mut g.arrival_rng)
                            }
                            Arrival::Fixed { interval } => *interval,
                        })
                    };
                    (pkt, g.out, gap)
                };
                self.counters[elem as usize].packets_out += 1;
                self.generated_by_entity[pkt.src as usize] += 1;
                self.active_packets += 1;
                match gap {
                    Some(gap) => {
                        let next = self.now + gap;
                        if next <= self.until {
                            self.heap.push(next, Event::Generate { elem });
                        } else {
                            self.open_generators -= 1;
                        }
                    }
                    None => self.open_generators -= 1,
                }
                self.heap.push(self.now, Event::Arrive { elem: out, pkt });
                Ok(())
            }
            Event::Arrive { elem, pkt } => self.arrive(elem, pkt),
            Event::ServiceDone { elem } => {
                let (pkt, forwarded, out) = {
                    let Elem::Router(r) = &mut self.elems[elem as usize] else { unreachable!() };
                    let pkt = r.in_service.take().expect("completion without packet");
                    let forwarded = r.forward_rng.unit() < r.forward_prob;
                    (pkt, forwarded, r.out)
                };
                if forwarded {
                    self.counters[elem as usize].packets_out += 1;
                    match out {
                        Some(next) => self.heap.push(self.now, Event::Arrive { elem: next, pkt }),
                        None => self.absorb(),
                    }
                } else {
                    self.counters[elem as usize].packets_dropped += 1;
                    self.absorb();
                }
                let has_more = {
                    let Elem::Router(r) = &self.elems[elem as usize] else { unreachable!() };
                    !r.queue.is_empty()
                };
                if has_more {
                    self.start_service(elem);
                }
                Ok(())
            }
            Event::MonitorSample { slot } => {
                let router = self.queue_samples[slot as usize].0;
                let (bytes, len) = {
                    let Elem::Router(r) = &self.elems[router as usize] else { unreachable!() };
                    (r.queued_bytes, r.queue.len() as u64)
                };
                self.queue_samples[slot as usize]
                    .1
                    .push(QueueSample { time: self.now, bytes, len });
                let mean = 1.0 / self.params.monitor_cap;
                let gap =
                    sample_truncated_exp(mean, Some(mean), &mut self.monitor_rngs[slot as usize]);
                self.schedule(self.now + gap, Event::MonitorSample { slot });
                Ok(())
            }
            Event::ServiceLog { slot } => {
                let router = self.service_log[slot as usize].0;
                let c = &self.counters[router as usize];
                let avg = if c.processed == 0 { 0.0 } else { c.sum_wait / c.processed as f64 };
                self.service_log[slot as usize]
                    .1
                    .push(ServiceLogEntry { time: self.now, avg_wait: avg });
                self.schedule(
                    self.now + self.params.service_log_interval,
                    Event::ServiceLog { slot },
                );
                Ok(())
            }
        }
    }

    fn run(&mut self) -> Result<(), SimError> {
        self.prime();
        while let Some(t) = self.heap.next_time() {
            if t > self.until {
                break;
            }
            let (t, ev) = self.heap.pop().expect("peeked");
            debug_assert!(t >= self.now);
            self.now = t;
            self.events += 1;
            self.handle(ev)?;
            if self.active_packets == 0 && self.open_generators == 0 {
                break;
            }
        }
        Ok(())
    }

    fn finalize(&self) -> SimStats {
        let mut stats = SimStats {
            until: self.until,
            events_processed: self.events,
            ..Default::default()
        };
        for (i, n) in self.topo.nodes().iter().enumerate() {
            let mut c = self.counters[i].clone();
            if let Elem::Router(r) = &self.elems[i] {
                c.residual = r.queue.len() as u64 + u64::from(r.in_service.is_some());
            }
            stats.nodes.insert(n.id.clone(), c);
            if let Elem::Sink(s) = &self.elems[i] {
                stats.sinks.insert(
                    n.id.clone(),
                    SinkStats {
                        received: s.received,
                        delays: s.delays.clone(),
                        interarrivals: s.interarrivals.clone(),
                    },
                );
            }
        }
        for (router, samples) in &self.queue_samples {
            stats
                .queue_samples
                .insert(self.topo.node(*router).id.clone(), samples.clone());
        }
        for (router, log) in &self.service_log {
            stats
                .service_log
                .insert(self.topo.node(*router).id.clone(), log.clone());
        }
        for (i, id) in self.entity_ids.iter().enumerate() {
            if self.generated_by_entity[i] > 0 {
                stats
                    .generated_by_entity
                    .insert(id.clone(), self.generated_by_entity[i]);
            }
            if self.delivered_by_entity[i] > 0 {
                stats
                    .delivered_by_entity
                    .insert(id.clone(), self.delivered_by_entity[i]);
            }
        }
        stats
    }
}

/// Runs the simulation to the given horizon and returns the collected
/// statistics. Identical inputs produce identical statistics.
pub fn run_simulation(topo: &Topology, params: &SimParams, until: f64) -> Result<SimStats, SimError> {
    run_simulation_with_transit(topo, params, until, None)
}

/// As [`run_simulation`], with routers of the listed entities offloaded
/// through the external hop.
pub fn run_simulation_with_transit<'a>(
    topo: &'a Topology,
    params: &'a SimParams,
    until: f64,
    external: Option<(&BTreeSet<String>, &'a mut dyn ExternalHop)>,
) -> Result<SimStats, SimError> {
    let mut engine = Engine::new(topo, params, until, external)?;
    engine.run()?;
    Ok(engine.finalize())
}

//! Bit-exact Map, Shuffle and Reduce execution on a materialized instance.
//!
//! Intermediate values are synthetic: `v[q, n]` is a keyed pseudorandom
//! string of `T` bits derived from `(q, n, seed)`. LowCL nodes receive plain
//! unicasts of whole compulsory batches. HighCL nodes receive, for every
//! sender `k` and every set `Ψ` of HighCL nodes not containing `k`, one coded
//! message: the XOR of the blocks `V_{k→i}^{Ψ∖{i}}` (all values of `i`'s
//! functions over sub-batch `N_k^{Ψ∖{i}}`), each zero-padded at the tail to
//! the longest block.

use std::collections::HashMap;

use bitvec::prelude::*;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::allocation::MaterializedInstance;
use crate::error::{Error, FailureKind};
use crate::nodeset::NodeSet;
use crate::rational::Rational;

pub const DEFAULT_T_BITS: usize = 32;

pub type Bits = BitVec<u64, Lsb0>;

/// Stateless generator of ground-truth intermediate values.
///
/// ChaCha8 keyed by the seed, one stream per file, values of a file laid out
/// consecutively by function index.
#[derive(Debug, Clone)]
pub struct IvGenerator {
    seed: u64,
    t_bits: usize,
    words: usize,
}

impl IvGenerator {
    pub fn new(seed: u64, t_bits: usize) -> Self {
        assert!(t_bits > 0);
        IvGenerator {
            seed,
            t_bits,
            words: t_bits.div_ceil(64),
        }
    }

    pub fn words_per_iv(&self) -> usize {
        self.words
    }

    fn rng_at(&self, q: usize, n: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(n as u64);
        // next_u64 consumes two 32-bit words
        rng.set_word_pos((q as u128) * (self.words as u128) * 2);
        rng
    }

    fn fill(&self, rng: &mut ChaCha8Rng, out: &mut [u64]) {
        let tail = self.t_bits % 64;
        for chunk in out.chunks_mut(self.words) {
            for w in chunk.iter_mut() {
                *w = rng.next_u64();
            }
            if tail != 0 {
                chunk[self.words - 1] &= (1u64 << tail) - 1;
            }
        }
    }

    /// `v[q, n]` as little-endian words, bits at and above `T` cleared.
    pub fn payload(&self, q: usize, n: usize) -> Vec<u64> {
        let mut out = vec![0; self.words];
        self.fill(&mut self.rng_at(q, n), &mut out);
        out
    }

    /// All `q_count` values of file `n`, function-major.
    pub fn file_payloads(&self, n: usize, q_count: usize) -> Vec<u64> {
        let mut out = vec![0; self.words * q_count];
        self.fill(&mut self.rng_at(0, n), &mut out);
        out
    }
}

/// Intermediate values a node computed in the Map phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeStore {
    n_functions: usize,
    words: usize,
    files: HashMap<usize, Vec<u64>>,
}

impl NodeStore {
    pub fn iv(&self, q: usize, n: usize) -> Option<&[u64]> {
        if q >= self.n_functions {
            return None;
        }
        self.files
            .get(&n)
            .map(|buf| &buf[q * self.words..(q + 1) * self.words])
    }

    pub fn holds_file(&self, n: usize) -> bool {
        self.files.contains_key(&n)
    }

    pub fn iv_count(&self) -> usize {
        self.files.len() * self.n_functions
    }

    /// Drops the values of the given files, as if they had never been mapped.
    pub fn withhold<I: IntoIterator<Item = usize>>(&mut self, files: I) {
        for n in files {
            self.files.remove(&n);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapOutput {
    pub generator_seed: u64,
    pub nodes: Vec<NodeStore>,
}

/// Node `k` computes `v[q, n]` for every function `q` and every file `n` it
/// maps.
pub fn run_map(instance: &MaterializedInstance) -> MapOutput {
    let gen = IvGenerator::new(instance.seed, instance.t_bits);
    let nodes = instance
        .files_of
        .iter()
        .map(|files| NodeStore {
            n_functions: instance.n_functions,
            words: gen.words_per_iv(),
            files: files
                .iter()
                .map(|&n| (n, gen.file_payloads(n, instance.n_functions)))
                .collect(),
        })
        .collect();
    MapOutput {
        generator_seed: instance.seed,
        nodes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    Unicast,
    CodedMulticast,
}

/// The values one recipient wants from a message, in canonical `(q, n)`
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub recipient: usize,
    pub ivs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffleMessage {
    pub sender: usize,
    pub recipients: NodeSet,
    pub kind: MessageKind,
    pub payload: Bits,
    pub components: Vec<Component>,
}

impl ShuffleMessage {
    pub fn bits(&self) -> usize {
        self.payload.len()
    }

    fn component_for(&self, node: usize) -> Option<&Component> {
        self.components.iter().find(|c| c.recipient == node)
    }
}

fn block_ivs(
    instance: &MaterializedInstance,
    recipient: usize,
    files: std::ops::Range<usize>,
) -> Vec<(usize, usize)> {
    let mut ivs = Vec::with_capacity(instance.functions_of[recipient].len() * files.len());
    for q in instance.functions_of[recipient].clone() {
        for n in files.clone() {
            ivs.push((q, n));
        }
    }
    ivs
}

/// Concatenates the `T`-bit values `ivs` as found in `store`.
///
/// Returns the first `(q, n)` missing from the store on failure.
fn encode_block(
    store: &NodeStore,
    ivs: &[(usize, usize)],
    t_bits: usize,
) -> Result<Bits, (usize, usize)> {
    let mut bits = Bits::with_capacity(ivs.len() * t_bits);
    for &(q, n) in ivs {
        let words = store.iv(q, n).ok_or((q, n))?;
        bits.extend_from_bitslice(&words.view_bits::<Lsb0>()[..t_bits]);
    }
    Ok(bits)
}

fn xor_into(acc: &mut Bits, block: &Bits) {
    debug_assert!(block.len() <= acc.len());
    let mut block = block.clone();
    block.set_uninitialized(false);
    for (a, b) in acc.as_raw_mut_slice().iter_mut().zip(block.as_raw_slice()) {
        *a ^= *b;
    }
}

/// Builds every message of the Shuffle phase, grouped by sender: unicasts to
/// LowCL nodes, then coded multicasts in canonical order of the target set.
/// Messages whose components are all empty are omitted.
pub fn build_shuffle(instance: &MaterializedInstance, map: &MapOutput) -> Vec<ShuffleMessage> {
    let k_total = instance.k();
    let t = instance.t_bits;
    let highcl = instance.highcl();
    let targets: Vec<NodeSet> = highcl
        .subsets()
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect();
    let mut messages = Vec::new();
    for sender in 0..k_total {
        let store = &map.nodes[sender];
        for recipient in (0..instance.r).filter(|&i| i != sender) {
            let ivs = block_ivs(instance, recipient, instance.compulsory_files(sender));
            if ivs.is_empty() {
                continue;
            }
            let payload = encode_block(store, &ivs, t).expect("sender holds its own batch");
            messages.push(ShuffleMessage {
                sender,
                recipients: NodeSet::singleton(recipient),
                kind: MessageKind::Unicast,
                payload,
                components: vec![Component { recipient, ivs }],
            });
        }
        for &psi in targets.iter().filter(|s| !s.contains(sender)) {
            let components: Vec<Component> = psi
                .iter()
                .map(|i| Component {
                    recipient: i,
                    ivs: block_ivs(instance, i, instance.subbatch_files(sender, psi.remove(i))),
                })
                .collect();
            let longest = components.iter().map(|c| c.ivs.len()).max().unwrap_or(0);
            if longest == 0 {
                continue;
            }
            let mut payload = Bits::repeat(false, longest * t);
            for c in &components {
                let block = encode_block(store, &c.ivs, t).expect("sender holds its own batch");
                xor_into(&mut payload, &block);
            }
            messages.push(ShuffleMessage {
                sender,
                recipients: psi,
                kind: MessageKind::CodedMulticast,
                payload,
                components,
            });
        }
    }
    messages
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecodeFailure {
    pub q: usize,
    pub n: usize,
    pub kind: FailureKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MessageRecord {
    /// 1-based sender.
    pub sender: usize,
    pub recipients: NodeSet,
    pub kind: MessageKind,
    pub bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationReport {
    pub total_bits: u64,
    /// `total_bits / (Q N T)`.
    pub measured_load: Rational,
    pub per_sender_bits: Vec<u64>,
    pub messages: Vec<MessageRecord>,
    /// First failure per node, `None` when the node recovered everything.
    pub failures: Vec<Option<DecodeFailure>>,
}

impl SimulationReport {
    pub fn decode_success(&self) -> Vec<bool> {
        self.failures.iter().map(Option::is_none).collect()
    }

    pub fn all_decoded(&self) -> bool {
        self.failures.iter().all(Option::is_none)
    }

    /// [`Error::DecodeFailure`] for the first node that failed.
    pub fn check(&self) -> Result<(), Error> {
        match self
            .failures
            .iter()
            .enumerate()
            .find_map(|(node, f)| f.map(|f| (node, f)))
        {
            None => Ok(()),
            Some((node, f)) => Err(Error::DecodeFailure {
                node,
                q: f.q,
                n: f.n,
                kind: f.kind,
            }),
        }
    }
}

/// Values recovered by one node for its own functions.
struct Recovered {
    q_start: usize,
    n_files: usize,
    words: usize,
    data: Vec<u64>,
    present: Vec<bool>,
}

impl Recovered {
    fn new(q_range: std::ops::Range<usize>, n_files: usize, words: usize) -> Self {
        let slots = q_range.len() * n_files;
        Recovered {
            q_start: q_range.start,
            n_files,
            words,
            data: vec![0; slots * words],
            present: vec![false; slots],
        }
    }

    fn put(&mut self, q: usize, n: usize, words: &[u64]) {
        let slot = (q - self.q_start) * self.n_files + n;
        self.data[slot * self.words..(slot + 1) * self.words].copy_from_slice(words);
        self.present[slot] = true;
    }

    fn get(&self, q: usize, n: usize) -> Option<&[u64]> {
        let slot = (q - self.q_start) * self.n_files + n;
        self.present[slot].then(|| &self.data[slot * self.words..(slot + 1) * self.words])
    }
}

fn unpack(bits: &BitSlice<u64, Lsb0>, words: usize) -> Vec<u64> {
    let mut out = vec![0u64; words];
    for (w, chunk) in out.iter_mut().zip(bits.chunks(64)) {
        *w = chunk.load_le::<u64>();
    }
    out
}

/// Each node combines its Map store with the messages addressed to it,
/// cancels interference in coded messages using its own side information,
/// and checks the result against the ground-truth generator.
pub fn run_reduce(
    instance: &MaterializedInstance,
    map: &MapOutput,
    messages: &[ShuffleMessage],
) -> SimulationReport {
    let t = instance.t_bits;
    let gen = IvGenerator::new(map.generator_seed, t);
    let words = gen.words_per_iv();

    let mut per_sender_bits = vec![0u64; instance.k()];
    let mut records = Vec::with_capacity(messages.len());
    for msg in messages {
        per_sender_bits[msg.sender] += msg.bits() as u64;
        records.push(MessageRecord {
            sender: msg.sender + 1,
            recipients: msg.recipients,
            kind: msg.kind,
            bits: msg.bits() as u64,
        });
    }
    let total_bits: u64 = per_sender_bits.iter().sum();
    let denom = instance.n_functions * instance.n_files * t;
    let measured_load = Rational::from(total_bits as usize) / Rational::from(denom);

    let failures = (0..instance.k())
        .map(|node| decode_node(instance, map, messages, &gen, words, node))
        .collect();

    SimulationReport {
        total_bits,
        measured_load,
        per_sender_bits,
        messages: records,
        failures,
    }
}

fn decode_node(
    instance: &MaterializedInstance,
    map: &MapOutput,
    messages: &[ShuffleMessage],
    gen: &IvGenerator,
    words: usize,
    node: usize,
) -> Option<DecodeFailure> {
    let t = instance.t_bits;
    let store = &map.nodes[node];
    let wanted = instance.functions_of[node].clone();
    let mut got = Recovered::new(wanted.clone(), instance.n_files, words);
    let mut first_failure: Option<DecodeFailure> = None;

    for n in &instance.files_of[node] {
        for q in wanted.clone() {
            if let Some(v) = store.iv(q, *n) {
                got.put(q, *n, v);
            }
        }
    }

    for msg in messages.iter().filter(|m| m.recipients.contains(node)) {
        let Some(own) = msg.component_for(node) else {
            continue;
        };
        let mut acc = msg.payload.clone();
        let mut blocked = false;
        for other in msg.components.iter().filter(|c| c.recipient != node) {
            match encode_block(store, &other.ivs, t) {
                Ok(block) => xor_into(&mut acc, &block),
                Err((q, n)) => {
                    first_failure.get_or_insert(DecodeFailure {
                        q,
                        n,
                        kind: FailureKind::MissingSideInformation,
                    });
                    blocked = true;
                    break;
                }
            }
        }
        if blocked {
            continue;
        }
        for (idx, &(q, n)) in own.ivs.iter().enumerate() {
            let v = unpack(&acc[idx * t..(idx + 1) * t], words);
            got.put(q, n, &v);
        }
    }

    if first_failure.is_some() {
        return first_failure;
    }
    for q in wanted {
        let truth = gen.file_payloads_for(q, instance.n_files);
        for n in 0..instance.n_files {
            match got.get(q, n) {
                None => {
                    return Some(DecodeFailure {
                        q,
                        n,
                        kind: FailureKind::Missing,
                    })
                }
                Some(v) if v != &truth[n * words..(n + 1) * words] => {
                    return Some(DecodeFailure {
                        q,
                        n,
                        kind: FailureKind::Corrupted,
                    })
                }
                Some(_) => {}
            }
        }
    }
    None
}

impl IvGenerator {
    /// `v[q, n]` for every file `n < n_files`, file-major.
    fn file_payloads_for(&self, q: usize, n_files: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(n_files * self.words);
        for n in 0..n_files {
            out.extend(self.payload(q, n));
        }
        out
    }
}

/// Line-delimited JSON transcript, one record per message.
pub fn transcript_lines(report: &SimulationReport) -> impl Iterator<Item = String> + '_ {
    report
        .messages
        .iter()
        .map(|m| serde_json::to_string(m).expect("records serialize"))
}

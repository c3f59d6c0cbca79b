//! Versioned binary file formats.
//!
//! Every artifact starts with the same header: magic `EHE1`, a kind byte
//! (1 public key, 2 private key, 3 ciphertext, 4 circuit, 5 program), a
//! little-endian u16 version, five little-endian u32 parameters (k, w, n, v,
//! e; zero where not applicable) and a little-endian u64 payload length.
//! All multi-byte integers are little-endian; bit vectors pack LSB-first and
//! zero-pad to the byte boundary; monomial and control masks are stored as
//! ceil(v/64) little-endian 64-bit words; monomials are sorted
//! lexicographically on their word arrays so files are canonical. Gates are
//! stored as a u32 target followed by the control words and polarity words.

use std::path::Path;

use crate::anf::{Anf, Monomial};
use crate::bits::{words_for, BitVec};
use crate::cryptoval::{BlindnessClass, CryptovalPrivateKey, EncryptedProgram, PolySet};
use crate::error::{Error, Result};
use crate::gates::{Circuit, Gate};
use crate::ime::Ciphertext;
use crate::keygen::{BlockSpan, ImePrivateKey, ImePublicKey, InitEntry, InitialSet, KeyParams, ParamMode};

pub const MAGIC: [u8; 4] = *b"EHE1";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    PublicKey = 1,
    PrivateKey = 2,
    Ciphertext = 3,
    Circuit = 4,
    Program = 5,
}

impl Kind {
    fn from_byte(b: u8) -> Result<Kind> {
        Ok(match b {
            1 => Kind::PublicKey,
            2 => Kind::PrivateKey,
            3 => Kind::Ciphertext,
            4 => Kind::Circuit,
            5 => Kind::Program,
            other => {
                return Err(Error::Truncated(format!("unknown file kind byte {other}")));
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kind::PublicKey => "public key",
            Kind::PrivateKey => "private key",
            Kind::Ciphertext => "ciphertext",
            Kind::Circuit => "circuit",
            Kind::Program => "program",
        }
    }
}

/// The fixed file header.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FileHeader {
    pub kind: Kind,
    pub version: u16,
    pub k: u32,
    pub w: u32,
    pub n: u32,
    pub v: u32,
    pub e: u32,
    pub payload_len: u64,
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new() -> Self {
        Writer { buf: Vec::new() }
    }
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn mask_words(&mut self, bits: &BitVec, v: u32) {
        debug_assert_eq!(bits.len(), v);
        for i in 0..words_for(v) {
            self.u64(bits.words().get(i).copied().unwrap_or(0));
        }
    }
    fn gate(&mut self, g: &Gate, v: u32) {
        self.u32(g.target());
        self.mask_words(g.controls(), v);
        self.mask_words(g.polarity(), v);
    }
    fn circuit(&mut self, c: &Circuit) {
        self.u32(c.gate_count() as u32);
        for g in c.gates() {
            self.gate(g, c.width());
        }
    }
    fn poly(&mut self, p: &Anf, v: u32) {
        let monomials = p.sorted_monomials();
        self.u64(monomials.len() as u64);
        for m in monomials {
            self.mask_words(m.mask(), v);
        }
    }
    fn packed_bits(&mut self, bits: &BitVec) {
        let nbytes = (bits.len() as usize).div_ceil(8);
        let mut bytes = vec![0u8; nbytes];
        for i in 0..bits.len() {
            if bits.get(i) {
                bytes[(i / 8) as usize] |= 1 << (i % 8);
            }
        }
        self.buf.extend_from_slice(&bytes);
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Reader { data, pos: 0 }
    }
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::Truncated(format!(
                "need {n} bytes at offset {}, file has {}",
                self.pos,
                self.data.len()
            )));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn mask_words(&mut self, v: u32) -> Result<BitVec> {
        let mut bits = BitVec::zeros(v);
        for wi in 0..words_for(v) {
            let word = self.u64()?;
            for b in 0..64u32 {
                let idx = wi as u32 * 64 + b;
                if idx < v && (word >> b) & 1 == 1 {
                    bits.set(idx, true);
                }
            }
        }
        Ok(bits)
    }
    fn gate(&mut self, v: u32) -> Result<Gate> {
        let target = self.u32()?;
        let controls = self.mask_words(v)?;
        let polarity = self.mask_words(v)?;
        Gate::new(target, controls, polarity)
    }
    fn circuit(&mut self, v: u32) -> Result<Circuit> {
        let count = self.u32()? as usize;
        let mut gates = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            gates.push(self.gate(v)?);
        }
        Circuit::new(v, gates)
    }
    fn poly(&mut self, v: u32) -> Result<Anf> {
        let count = self.u64()? as usize;
        let mut p = Anf::zero(v);
        for _ in 0..count {
            let mask = self.mask_words(v)?;
            if p.contains(&Monomial::new(mask.clone())) {
                return Err(Error::Truncated("duplicate monomial in polynomial".into()));
            }
            p.toggle(Monomial::new(mask));
        }
        Ok(p)
    }
    fn packed_bits(&mut self, nbits: u32) -> Result<BitVec> {
        let bytes = self.take((nbits as usize).div_ceil(8))?;
        let mut bits = BitVec::zeros(nbits);
        for i in 0..nbits {
            if (bytes[(i / 8) as usize] >> (i % 8)) & 1 == 1 {
                bits.set(i, true);
            }
        }
        Ok(bits)
    }
    fn finished(&self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Truncated(format!(
                "{} trailing bytes after payload",
                self.data.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn emit(kind: Kind, k: u32, w: u32, n: u32, v: u32, e: u32, payload: Vec<u8>) -> Vec<u8> {
    let mut out = Writer::new();
    out.buf.extend_from_slice(&MAGIC);
    out.u8(kind as u8);
    out.u16(FORMAT_VERSION);
    out.u32(k);
    out.u32(w);
    out.u32(n);
    out.u32(v);
    out.u32(e);
    out.u64(payload.len() as u64);
    out.buf.extend_from_slice(&payload);
    out.buf
}

/// Parse and check the header, returning it plus the payload slice.
pub fn read_header(data: &[u8]) -> Result<(FileHeader, &[u8])> {
    let mut r = Reader::new(data);
    let magic = r.take(4)?;
    if magic != MAGIC {
        return Err(Error::BadMagic);
    }
    let kind = Kind::from_byte(r.u8()?)?;
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(Error::Version(version));
    }
    let header = FileHeader {
        kind,
        version,
        k: r.u32()?,
        w: r.u32()?,
        n: r.u32()?,
        v: r.u32()?,
        e: r.u32()?,
        payload_len: r.u64()?,
    };
    let payload = r.take(header.payload_len as usize)?;
    if r.pos != data.len() {
        return Err(Error::Truncated("trailing bytes after payload".into()));
    }
    Ok((header, payload))
}

fn expect_kind(header: &FileHeader, kind: Kind) -> Result<()> {
    if header.kind != kind {
        return Err(Error::WrongKind {
            expected: kind.name(),
            got: header.kind as u8,
        });
    }
    Ok(())
}

pub fn serialize_public_key(pk: &ImePublicKey) -> Vec<u8> {
    let mut w = Writer::new();
    w.u32(pk.measured_degree);
    for p in &pk.polys {
        w.poly(p, pk.nvars);
    }
    emit(Kind::PublicKey, pk.k, pk.w, 0, pk.nvars, 0, w.buf)
}

pub fn deserialize_public_key(data: &[u8]) -> Result<ImePublicKey> {
    let (header, payload) = read_header(data)?;
    expect_kind(&header, Kind::PublicKey)?;
    let mut r = Reader::new(payload);
    let measured_degree = r.u32()?;
    let polys = (0..header.w)
        .map(|_| r.poly(header.v))
        .collect::<Result<Vec<_>>>()?;
    r.finished()?;
    Ok(ImePublicKey {
        k: header.k,
        w: header.w,
        nvars: header.v,
        measured_degree,
        polys,
    })
}

pub fn serialize_private_key(sk: &ImePrivateKey) -> Vec<u8> {
    let p = &sk.params;
    let mut w = Writer::new();
    w.u8(1); // scheme: message key
    w.u64(p.seed);
    w.u16(crate::rng::STREAM_VERSION);
    w.u8(match p.mode {
        ParamMode::Secure => 1,
        ParamMode::Insecure => 0,
    });
    w.u32(p.d_lo);
    w.u32(p.d_hi);
    w.u64(p.monomial_budget as u64);
    w.u32(p.fillers_per_gap);
    w.u32(p.block_sizes.len() as u32);
    for &h in &p.block_sizes {
        w.u32(h);
    }
    w.u32(sk.blocks.len() as u32);
    for span in &sk.blocks {
        w.u32(span.start);
        w.u32(span.len);
    }
    w.u32(sk.initial.entries.len() as u32);
    for e in &sk.initial.entries {
        w.u32(e.target);
        w.u32(e.a);
        w.u32(e.b);
    }
    w.circuit(&sk.mapping);
    emit(Kind::PrivateKey, p.k, p.w, 0, p.nvars, 0, w.buf)
}

pub fn deserialize_private_key(data: &[u8]) -> Result<ImePrivateKey> {
    let (header, payload) = read_header(data)?;
    expect_kind(&header, Kind::PrivateKey)?;
    let mut r = Reader::new(payload);
    if r.u8()? != 1 {
        return Err(Error::WrongKind {
            expected: "message private key",
            got: 2,
        });
    }
    let seed = r.u64()?;
    let stream_version = r.u16()?;
    if stream_version != crate::rng::STREAM_VERSION {
        return Err(Error::Version(stream_version));
    }
    let mode = if r.u8()? == 1 {
        ParamMode::Secure
    } else {
        ParamMode::Insecure
    };
    let d_lo = r.u32()?;
    let d_hi = r.u32()?;
    let monomial_budget = r.u64()? as usize;
    let fillers_per_gap = r.u32()?;
    let nblocks = r.u32()? as usize;
    let block_sizes = (0..nblocks).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    let nspans = r.u32()? as usize;
    let blocks = (0..nspans)
        .map(|_| {
            Ok(BlockSpan {
                start: r.u32()?,
                len: r.u32()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let nentries = r.u32()? as usize;
    let entries = (0..nentries)
        .map(|_| {
            Ok(InitEntry {
                target: r.u32()?,
                a: r.u32()?,
                b: r.u32()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mapping = r.circuit(header.v)?;
    r.finished()?;
    Ok(ImePrivateKey {
        params: KeyParams {
            k: header.k,
            w: header.w,
            nvars: header.v,
            d_lo,
            d_hi,
            block_sizes,
            fillers_per_gap,
            monomial_budget,
            seed,
            mode,
        },
        mapping,
        blocks,
        initial: InitialSet {
            nvars: header.v,
            w: header.w,
            k: header.k,
            entries,
        },
    })
}

pub fn serialize_cv_key(key: &CryptovalPrivateKey) -> Vec<u8> {
    let n = key.r_cv.width();
    let mut w = Writer::new();
    w.u8(2); // scheme: cryptovaluation key
    w.u32(key.output_map.len() as u32);
    for &wire in &key.output_map {
        w.u32(wire);
    }
    w.circuit(&key.r_cv);
    emit(Kind::PrivateKey, key.k, key.w, n, n, 0, w.buf)
}

pub fn deserialize_cv_key(data: &[u8]) -> Result<CryptovalPrivateKey> {
    let (header, payload) = read_header(data)?;
    expect_kind(&header, Kind::PrivateKey)?;
    let mut r = Reader::new(payload);
    if r.u8()? != 2 {
        return Err(Error::WrongKind {
            expected: "cryptovaluation private key",
            got: 1,
        });
    }
    let count = r.u32()? as usize;
    let output_map = (0..count).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    let r_cv = r.circuit(header.n)?;
    r.finished()?;
    Ok(CryptovalPrivateKey {
        r_cv,
        k: header.k,
        w: header.w,
        output_map,
    })
}

/// Ciphertext stream: the original plaintext bit length plus the blocks.
/// `width` is the per-block bit length (w for fresh ciphertexts, n for
/// evaluated program states).
pub fn serialize_ciphertexts(
    k: u32,
    width: u32,
    message_bits: u64,
    blocks: &[Ciphertext],
) -> Vec<u8> {
    let mut w = Writer::new();
    w.u64(message_bits);
    w.u32(blocks.len() as u32);
    for c in blocks {
        w.packed_bits(&c.bits);
    }
    emit(Kind::Ciphertext, k, width, 0, 0, 0, w.buf)
}

pub fn deserialize_ciphertexts(data: &[u8]) -> Result<(u32, u32, u64, Vec<Ciphertext>)> {
    let (header, payload) = read_header(data)?;
    expect_kind(&header, Kind::Ciphertext)?;
    let mut r = Reader::new(payload);
    let message_bits = r.u64()?;
    let count = r.u32()? as usize;
    let blocks = (0..count)
        .map(|_| {
            Ok(Ciphertext {
                bits: r.packed_bits(header.w)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    r.finished()?;
    Ok((header.k, header.w, message_bits, blocks))
}

pub fn serialize_circuit(c: &Circuit) -> Vec<u8> {
    let mut w = Writer::new();
    w.circuit(c);
    emit(Kind::Circuit, 0, 0, 0, c.width(), 0, w.buf)
}

pub fn deserialize_circuit(data: &[u8]) -> Result<Circuit> {
    let (header, payload) = read_header(data)?;
    expect_kind(&header, Kind::Circuit)?;
    let mut r = Reader::new(payload);
    let c = r.circuit(header.v)?;
    r.finished()?;
    Ok(c)
}

pub fn serialize_program(p: &EncryptedProgram) -> Vec<u8> {
    let mut w = Writer::new();
    w.u64(p.blindness.work_floor);
    w.u32(p.output_map.len() as u32);
    for &wire in &p.output_map {
        w.u32(wire);
    }
    for section in &p.sections {
        for poly in section {
            w.poly(poly, p.n);
        }
    }
    emit(
        Kind::Program,
        p.k,
        p.w,
        p.n,
        p.n,
        p.sections.len() as u32,
        w.buf,
    )
}

pub fn deserialize_program(data: &[u8]) -> Result<EncryptedProgram> {
    let (header, payload) = read_header(data)?;
    expect_kind(&header, Kind::Program)?;
    let mut r = Reader::new(payload);
    let work_floor = r.u64()?;
    let count = r.u32()? as usize;
    let output_map = (0..count).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    let mut sections: Vec<PolySet> = Vec::with_capacity(header.e as usize);
    for _ in 0..header.e {
        let polys = (0..header.n)
            .map(|_| r.poly(header.n))
            .collect::<Result<Vec<_>>>()?;
        sections.push(polys);
    }
    r.finished()?;
    Ok(EncryptedProgram {
        n: header.n,
        w: header.w,
        k: header.k,
        sections,
        output_map,
        blindness: BlindnessClass {
            width: header.n,
            sections: header.e,
            work_floor,
        },
    })
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    Ok(std::fs::read(path)?)
}

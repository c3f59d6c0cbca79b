//! Message encryption roundtrip: generate a key pair, encrypt a message by
//! evaluating the public polynomial set, decrypt by running the private
//! circuit backwards.
//!
//! Run with: cargo run --release --example message_encryption

use ehe::ime::{decrypt, encrypt, random_plaintext, PaddingMode};
use ehe::keygen::{generate_keypair, KeyParams};
use ehe::rng::StreamFactory;

fn main() {
    // Small demo parameters; switch to KeyParams::secure(128, 160, seed)
    // for the real thing (a few seconds of key generation).
    let params = KeyParams::insecure(16, 20, 42);
    let (public, private) = generate_keypair(&params).unwrap();
    println!(
        "key pair: k={} w={} degree={} mapping gates={}",
        public.k,
        public.w,
        public.measured_degree,
        private.mapping.gate_count()
    );

    let mut rng = StreamFactory::new(7).stream("demo-messages", 0);
    let mut failures = 0;
    for trial in 0..1000u64 {
        let message = random_plaintext(public.k, &mut rng);
        let padding = if trial % 2 == 0 {
            PaddingMode::Zeros
        } else {
            PaddingMode::Random { seed: trial }
        };
        let ciphertext = ehe::ime::encrypt_block(&public, &message, padding, trial).unwrap();
        let (recovered, _padding_bits) = decrypt(&private, &ciphertext).unwrap();
        if recovered != message {
            failures += 1;
        }
    }
    println!("1000 roundtrips, {failures} failures (decryption is exact)");

    let message = random_plaintext(public.k, &mut rng);
    let ciphertext = encrypt(&public, &message, PaddingMode::Zeros).unwrap();
    println!("message    = {:?}", message.bits);
    println!("ciphertext = {:?}", ciphertext.bits);
    assert_eq!(failures, 0);
}

//! Content-addressed media files: `<dir>/<sha256 hex>` plus a `.type`
//! sidecar holding the content type.

use std::io;
use std::path::Path;

use sha2::{Digest, Sha256};

pub const MAX_UPLOAD_BYTES: usize = 32 * 1024 * 1024;
pub const REF_PREFIX: &str = "sha256:";

pub fn media_ref(bytes: &[u8]) -> String {
    format!("{REF_PREFIX}{}", hex::encode(Sha256::digest(bytes)))
}

fn digest_of(media_ref: &str) -> Option<&str> {
    let hex = media_ref.strip_prefix(REF_PREFIX)?;
    (hex.len() == 64 && hex.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))).then_some(hex)
}

pub fn save(dir: &Path, bytes: &[u8], content_type: &str) -> io::Result<String> {
    let reference = media_ref(bytes);
    let digest = digest_of(&reference).expect("well-formed");
    std::fs::create_dir_all(dir)?;
    let path = dir.join(digest);
    if !path.exists() {
        let tmp = dir.join(format!("{digest}.tmp"));
        std::fs::write(&tmp, bytes)?;
        std::fs::rename(&tmp, &path)?;
    }
    std::fs::write(dir.join(format!("{digest}.type")), content_type)?;
    Ok(reference)
}

/// `Ok(None)` for malformed or unknown references.
pub fn load(dir: &Path, media_ref: &str) -> io::Result<Option<(Vec<u8>, String)>> {
    let Some(digest) = digest_of(media_ref) else {
        return Ok(None);
    };
    let bytes = match std::fs::read(dir.join(digest)) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e),
    };
    let content_type = std::fs::read_to_string(dir.join(format!("{digest}.type")))
        .unwrap_or_else(|_| "application/octet-stream".into());
    Ok(Some((bytes, content_type)))
}

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::imagecore::ImageFormat;

/// One input image, addressed relative to the dataset root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetEntry {
    /// Relative path with `/` separators.
    pub path: String,
    pub ordinal: u64,
    pub person_id: Option<String>,
    pub camera_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkFailure {
    pub path: PathBuf,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct DatasetWalk {
    pub entries: Vec<DatasetEntry>,
    /// Files or directories that could not be read; the walk continues past them.
    pub failures: Vec<WalkFailure>,
}

/// Parses `personId_cameraId...` ReID file names such as
/// `0002_c1s1_000451_03.jpg` into `("0002", "c1")`.
pub fn parse_reid_name(file_name: &str) -> Option<(String, String)> {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    let re = PATTERN.get_or_init(|| Regex::new(r"(?i)^(\w+)_(c\d+)\S*\.(jpg|jpeg|png)$").unwrap());
    let caps = re.captures(file_name)?;
    Some((caps[1].to_string(), caps[2].to_string()))
}

fn relative_key(root: &Path, path: &Path) -> Option<String> {
    let rel = path.strip_prefix(root).ok()?;
    let parts: Option<Vec<&str>> = rel.components().map(|c| c.as_os_str().to_str()).collect();
    Some(parts?.join("/"))
}

/// Recursively lists PNG/JPEG files under `root`, sorted byte-wise by
/// relative path, with ordinals assigned in that order.
pub fn walk_dataset(root: &Path) -> Result<DatasetWalk> {
    std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;

    let mut walk = DatasetWalk::default();
    let mut paths = Vec::new();
    for item in WalkDir::new(root).follow_links(false) {
        let item = match item {
            Ok(item) => item,
            Err(e) => {
                walk.failures.push(WalkFailure {
                    path: e
                        .path()
                        .map(Path::to_path_buf)
                        .unwrap_or_else(|| root.to_path_buf()),
                    message: e.to_string(),
                });
                continue;
            }
        };
        if !item.file_type().is_file() {
            continue;
        }
        let supported = item
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .and_then(ImageFormat::from_extension)
            .is_some();
        if !supported {
            continue;
        }
        match relative_key(root, item.path()) {
            Some(key) => paths.push(key),
            None => walk.failures.push(WalkFailure {
                path: item.path().to_path_buf(),
                message: "path is not valid UTF-8".into(),
            }),
        }
    }
    paths.sort_unstable_by(|a, b| a.as_bytes().cmp(b.as_bytes()));

    walk.entries = paths
        .into_iter()
        .enumerate()
        .map(|(ordinal, path)| {
            let name = path.rsplit('/').next().unwrap_or(&path);
            let (person_id, camera_id) = match parse_reid_name(name) {
                Some((p, c)) => (Some(p), Some(c)),
                None => (None, None),
            };
            DatasetEntry {
                path,
                ordinal: ordinal as u64,
                person_id,
                camera_id,
            }
        })
        .collect();
    Ok(walk)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn market_names() {
        assert_eq!(
            parse_reid_name("0002_c1s1_000451_03.jpg"),
            Some(("0002".into(), "c1".into()))
        );
        assert_eq!(
            parse_reid_name("1501_c6s4_001902_01.PNG"),
            Some(("1501".into(), "c6".into()))
        );
        // Market-1501 junk images carry a -1 id, which is not a \w+ token
        assert_eq!(parse_reid_name("-1_c1s1_000401_03.jpg"), None);
        assert_eq!(parse_reid_name("cat.png"), None);
        assert_eq!(parse_reid_name("0002_c1s1.bmp"), None);
    }

    #[test]
    fn empty_and_ordered() {
        let dir = tempfile::tempdir().unwrap();
        assert!(walk_dataset(dir.path()).unwrap().entries.is_empty());

        for name in ["b.png", "a.jpg", "notes.txt"] {
            std::fs::write(dir.path().join(name), b"x").unwrap();
        }
        std::fs::create_dir(dir.path().join("sub")).unwrap();
        std::fs::write(dir.path().join("sub/0002_c3s1_000001_00.jpeg"), b"x").unwrap();
        std::fs::write(dir.path().join("B.PNG"), b"x").unwrap();

        let walk = walk_dataset(dir.path()).unwrap();
        let names: Vec<(&str, u64)> = walk
            .entries
            .iter()
            .map(|e| (e.path.as_str(), e.ordinal))
            .collect();
        assert_eq!(
            names,
            [
                ("B.PNG", 0),
                ("a.jpg", 1),
                ("b.png", 2),
                ("sub/0002_c3s1_000001_00.jpeg", 3)
            ]
        );
        assert_eq!(walk.entries[3].person_id.as_deref(), Some("0002"));
        assert_eq!(walk.entries[3].camera_id.as_deref(), Some("c3"));
        assert_eq!(walk.entries[0].person_id, None);
    }

    #[test]
    fn missing_root_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            walk_dataset(&dir.path().join("nope")),
            Err(Error::Io { .. })
        ));
    }
}

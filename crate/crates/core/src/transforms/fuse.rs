use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::imagecore::ImageBuffer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    R,
    G,
    B,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::R, Channel::G, Channel::B];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Set of RGB channels, serialized as letters in RGB order (`"RB"`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ChannelSet(u8);

impl ChannelSet {
    /// The six subsets that fusion accepts: three singles then three pairs.
    pub const FUSABLE: [ChannelSet; 6] = [
        ChannelSet(0b001),
        ChannelSet(0b010),
        ChannelSet(0b100),
        ChannelSet(0b011),
        ChannelSet(0b101),
        ChannelSet(0b110),
    ];

    pub fn from_channels(channels: &[Channel]) -> Self {
        ChannelSet(channels.iter().fold(0, |m, c| m | 1 << c.index()))
    }

    pub fn contains(self, c: Channel) -> bool {
        self.0 & (1 << c.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Channel> {
        Channel::ALL.into_iter().filter(move |&c| self.contains(c))
    }

    /// Subsets of a given size (1 or 2), in canonical order.
    pub fn of_size(size: usize) -> &'static [ChannelSet] {
        match size {
            1 => &Self::FUSABLE[..3],
            2 => &Self::FUSABLE[3..],
            _ => &[],
        }
    }
}

impl fmt::Display for ChannelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.iter() {
            write!(f, "{c:?}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ChannelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChannelSet({self})")
    }
}

impl FromStr for ChannelSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut set = ChannelSet::default();
        for ch in s.chars() {
            let c = match ch.to_ascii_uppercase() {
                'R' => Channel::R,
                'G' => Channel::G,
                'B' => Channel::B,
                _ => return Err(Error::config(format!("bad channel letter {ch:?} in {s:?}"))),
            };
            if set.contains(c) {
                return Err(Error::config(format!("duplicate channel in {s:?}")));
            }
            set.0 |= 1 << c.index();
        }
        Ok(set)
    }
}

impl Serialize for ChannelSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChannelSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Overwrites the selected channels of `rgb` with `plane`; the others are
/// copied unchanged. The subset must hold one or two channels.
pub fn fuse_channels(
    rgb: &ImageBuffer,
    plane: &ImageBuffer,
    channels: ChannelSet,
) -> Result<ImageBuffer> {
    rgb.expect_channels(3)?;
    plane.expect_channels(1)?;
    rgb.expect_same_size(plane)?;
    if !(1..=2).contains(&channels.len()) {
        return Err(Error::InvalidChannelSubset(channels.len()));
    }
    let mut out = rgb.clone();
    let selected: Vec<usize> = channels.iter().map(Channel::index).collect();
    for (px, &v) in out.data_mut().chunks_exact_mut(3).zip(plane.data()) {
        for &c in &selected {
            px[c] = v;
        }
    }
    Ok(out)
}

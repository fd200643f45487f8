use super::{Reader, WireError, Writer};
use crate::kernel::{NodeId, MTU};
use crate::pstl::StaticVector;

/// Longest source route a DSR message may carry.
pub const MAX_PATH: usize = 10;

/// Bytes per advertised route in a DSDV update.
const ROUTE_BYTES: usize = 8 + 8 + 2 + 4;

/// Routes that fit in one DSDV update frame.
pub const MAX_UPDATE_ROUTES: usize = (MTU - 3) / ROUTE_BYTES;

/// One encoded radio frame.
pub type Frame = StaticVector<u8, MTU>;

/// Source route, source first.
pub type Path = StaticVector<NodeId, MAX_PATH>;

/// First byte of every protocol frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum MessageKind {
    Flood = 0x01,
    TreeBeacon = 0x02,
    TreeData = 0x03,
    DsdvUpdate = 0x04,
    DsdvData = 0x05,
    DsrRequest = 0x06,
    DsrReply = 0x07,
    DsrData = 0x08,
    DsrAck = 0x09,
    Secure = 0x0a,
}

impl MessageKind {
    pub const ALL: [MessageKind; 10] = [
        MessageKind::Flood,
        MessageKind::TreeBeacon,
        MessageKind::TreeData,
        MessageKind::DsdvUpdate,
        MessageKind::DsdvData,
        MessageKind::DsrRequest,
        MessageKind::DsrReply,
        MessageKind::DsrData,
        MessageKind::DsrAck,
        MessageKind::Secure,
    ];

    pub fn from_byte(byte: u8) -> Result<Self, WireError> {
        Self::ALL
            .into_iter()
            .find(|k| *k as u8 == byte)
            .ok_or(WireError::UnknownKind(byte))
    }

    pub fn name(self) -> &'static str {
        match self {
            MessageKind::Flood => "flood",
            MessageKind::TreeBeacon => "tree_beacon",
            MessageKind::TreeData => "tree_data",
            MessageKind::DsdvUpdate => "dsdv_update",
            MessageKind::DsdvData => "dsdv_data",
            MessageKind::DsrRequest => "dsr_rreq",
            MessageKind::DsrReply => "dsr_rrep",
            MessageKind::DsrData => "dsr_data",
            MessageKind::DsrAck => "dsr_ack",
            MessageKind::Secure => "secure",
        }
    }

    /// Fixed header bytes in front of the payload, for kinds that carry one.
    /// DSR data headers grow with the path; this is the longest path.
    pub const fn header_len(self) -> usize {
        match self {
            MessageKind::Flood => 1 + 8 + 2 + 1,
            MessageKind::TreeData => 1 + 8,
            MessageKind::DsdvData => 1 + 8 + 8 + 1,
            MessageKind::DsrData | MessageKind::DsrAck => 1 + 1 + 8 * MAX_PATH + 1,
            MessageKind::Secure => 1,
            MessageKind::TreeBeacon => 1 + 8 + 1,
            MessageKind::DsdvUpdate => 1 + 2,
            MessageKind::DsrRequest | MessageKind::DsrReply => 1 + 2 + 8 + 1,
        }
    }
}

/// A route as advertised in a DSDV update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AdvertisedRoute {
    pub dest: NodeId,
    pub next_hop: NodeId,
    pub hops: u16,
    pub seq: u32,
}

/// Decoded protocol frame. Payloads borrow from the frame they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message<'a> {
    Flood {
        originator: NodeId,
        seq: u16,
        ttl: u8,
        payload: &'a [u8],
    },
    TreeBeacon {
        sink: NodeId,
        hops: u8,
    },
    TreeData {
        originator: NodeId,
        payload: &'a [u8],
    },
    DsdvUpdate {
        routes: StaticVector<AdvertisedRoute, MAX_UPDATE_ROUTES>,
    },
    DsdvData {
        origin: NodeId,
        dest: NodeId,
        ttl: u8,
        payload: &'a [u8],
    },
    DsrRequest {
        req_id: u16,
        target: NodeId,
        path: Path,
    },
    DsrReply {
        req_id: u16,
        target: NodeId,
        path: Path,
    },
    DsrData {
        path: Path,
        cursor: u8,
        payload: &'a [u8],
    },
    DsrAck {
        path: Path,
        cursor: u8,
    },
    Secure {
        ciphertext: &'a [u8],
    },
}

fn write_path(w: &mut Writer<'_>, path: &Path) -> Result<(), WireError> {
    w.write_u8(path.len() as u8)?;
    path.iter().try_for_each(|n| w.write_u64(n.get()))
}

fn read_path(r: &mut Reader<'_>) -> Result<Path, WireError> {
    let len = usize::from(r.read_u8()?);
    if len > MAX_PATH {
        return Err(WireError::Malformed("path longer than MAX_PATH"));
    }
    let mut path = Path::new();
    for _ in 0..len {
        path.push(NodeId(r.read_u64()?)).expect("length checked");
    }
    Ok(path)
}

impl<'a> Message<'a> {
    pub fn kind(&self) -> MessageKind {
        match self {
            Message::Flood { .. } => MessageKind::Flood,
            Message::TreeBeacon { .. } => MessageKind::TreeBeacon,
            Message::TreeData { .. } => MessageKind::TreeData,
            Message::DsdvUpdate { .. } => MessageKind::DsdvUpdate,
            Message::DsdvData { .. } => MessageKind::DsdvData,
            Message::DsrRequest { .. } => MessageKind::DsrRequest,
            Message::DsrReply { .. } => MessageKind::DsrReply,
            Message::DsrData { .. } => MessageKind::DsrData,
            Message::DsrAck { .. } => MessageKind::DsrAck,
            Message::Secure { .. } => MessageKind::Secure,
        }
    }

    /// Writes the frame into `buf` and returns the number of bytes used.
    pub fn encode_into(&self, buf: &mut [u8]) -> Result<usize, WireError> {
        let mut w = Writer::new(buf);
        w.write_u8(self.kind() as u8)?;
        match self {
            Message::Flood {
                originator,
                seq,
                ttl,
                payload,
            } => {
                w.write_u64(originator.get())?;
                w.write_u16(*seq)?;
                w.write_u8(*ttl)?;
                w.write_bytes(payload)?;
            }
            Message::TreeBeacon { sink, hops } => {
                w.write_u64(sink.get())?;
                w.write_u8(*hops)?;
            }
            Message::TreeData {
                originator,
                payload,
            } => {
                w.write_u64(originator.get())?;
                w.write_bytes(payload)?;
            }
            Message::DsdvUpdate { routes } => {
                w.write_u16(routes.len() as u16)?;
                for route in routes {
                    w.write_u64(route.dest.get())?;
                    w.write_u64(route.next_hop.get())?;
                    w.write_u16(route.hops)?;
                    w.write_u32(route.seq)?;
                }
            }
            Message::DsdvData {
                origin,
                dest,
                ttl,
                payload,
            } => {
                w.write_u64(origin.get())?;
                w.write_u64(dest.get())?;
                w.write_u8(*ttl)?;
                w.write_bytes(payload)?;
            }
            Message::DsrRequest {
                req_id,
                target,
                path,
            }
            | Message::DsrReply {
                req_id,
                target,
                path,
            } => {
                w.write_u16(*req_id)?;
                w.write_u64(target.get())?;
                write_path(&mut w, path)?;
            }
            Message::DsrData {
                path,
                cursor,
                payload,
            } => {
                write_path(&mut w, path)?;
                w.write_u8(*cursor)?;
                w.write_bytes(payload)?;
            }
            Message::DsrAck { path, cursor } => {
                write_path(&mut w, path)?;
                w.write_u8(*cursor)?;
            }
            Message::Secure { ciphertext } => w.write_bytes(ciphertext)?,
        }
        Ok(w.position())
    }

    /// Encodes into a radio frame; fails if the message exceeds the MTU.
    pub fn encode(&self) -> Result<Frame, WireError> {
        let mut buf = [0u8; MTU];
        let len = self.encode_into(&mut buf)?;
        Ok(Frame::from_slice(&buf[..len]).expect("len <= MTU"))
    }

    pub fn decode(bytes: &'a [u8]) -> Result<Self, WireError> {
        let mut r = Reader::new(bytes);
        let kind = MessageKind::from_byte(r.read_u8()?)?;
        let message = match kind {
            MessageKind::Flood => Message::Flood {
                originator: NodeId(r.read_u64()?),
                seq: r.read_u16()?,
                ttl: r.read_u8()?,
                payload: r.rest(),
            },
            MessageKind::TreeBeacon => Message::TreeBeacon {
                sink: NodeId(r.read_u64()?),
                hops: r.read_u8()?,
            },
            MessageKind::TreeData => Message::TreeData {
                originator: NodeId(r.read_u64()?),
                payload: r.rest(),
            },
            MessageKind::DsdvUpdate => {
                let count = usize::from(r.read_u16()?);
                if count > MAX_UPDATE_ROUTES {
                    return Err(WireError::Malformed("too many routes in update"));
                }
                let mut routes = StaticVector::new();
                for _ in 0..count {
                    let route = AdvertisedRoute {
                        dest: NodeId(r.read_u64()?),
                        next_hop: NodeId(r.read_u64()?),
                        hops: r.read_u16()?,
                        seq: r.read_u32()?,
                    };
                    routes.push(route).expect("count checked");
                }
                Message::DsdvUpdate { routes }
            }
            MessageKind::DsdvData => Message::DsdvData {
                origin: NodeId(r.read_u64()?),
                dest: NodeId(r.read_u64()?),
                ttl: r.read_u8()?,
                payload: r.rest(),
            },
            MessageKind::DsrRequest => Message::DsrRequest {
                req_id: r.read_u16()?,
                target: NodeId(r.read_u64()?),
                path: read_path(&mut r)?,
            },
            MessageKind::DsrReply => Message::DsrReply {
                req_id: r.read_u16()?,
                target: NodeId(r.read_u64()?),
                path: read_path(&mut r)?,
            },
            MessageKind::DsrData => Message::DsrData {
                path: read_path(&mut r)?,
                cursor: r.read_u8()?,
                payload: r.rest(),
            },
            MessageKind::DsrAck => Message::DsrAck {
                path: read_path(&mut r)?,
                cursor: r.read_u8()?,
            },
            MessageKind::Secure => Message::Secure {
                ciphertext: r.rest(),
            },
        };
        if !r.is_empty() {
            return Err(WireError::Malformed("trailing bytes"));
        }
        Ok(message)
    }
}

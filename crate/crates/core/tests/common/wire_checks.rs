//! Integer codec checks shared with the acceptance run.

use wsn_core::kernel::NodeId;
use wsn_core::pstl::StaticVector;
use wsn_core::simnet::SimRng;
use wsn_core::wire::{
    AdvertisedRoute, Message, MessageKind, Path, Reader, Width, WireError, Writer,
};

fn random_value(rng: &mut SimRng, width: Width) -> u64 {
    let v = rng.next_u64();
    match rng.below(4) {
        0 => width.max_value(),
        1 => 0,
        _ => v & width.max_value(),
    }
}

pub fn round_trips(cases: usize) {
    let mut rng = SimRng::new(11);
    for width in Width::ALL {
        for _ in 0..cases {
            let v = random_value(&mut rng, width);
            let offset = rng.below(8) as usize;
            let mut buf = [0u8; 16];
            let mut w = Writer::at(&mut buf, offset);
            w.write_uint(width, v).unwrap();
            assert_eq!(w.position(), offset + width.bytes());
            let mut r = Reader::at(&buf, offset);
            assert_eq!(r.read_uint(width).unwrap(), v);
            assert_eq!(r.position(), offset + width.bytes());
        }
    }
}

pub fn golden_vectors() {
    let cases: [(Width, u64, &[u8]); 6] = [
        (Width::U8, 0xab, &[0xab]),
        (Width::U16, 0x1234, &[0x12, 0x34]),
        (Width::U32, 0, &[0, 0, 0, 0]),
        (Width::U32, 0xdead_beef, &[0xde, 0xad, 0xbe, 0xef]),
        (Width::U64, 0x0102_0304_0506_0708, &[1, 2, 3, 4, 5, 6, 7, 8]),
        (Width::U64, u64::MAX, &[0xff; 8]),
    ];
    for (width, value, bytes) in cases {
        let mut buf = [0u8; 8];
        Writer::new(&mut buf).write_uint(width, value).unwrap();
        assert_eq!(&buf[..bytes.len()], bytes);
        assert_eq!(Reader::new(bytes).read_uint(width).unwrap(), value);
    }
}

type Observed = (Vec<u8>, Result<(), WireError>, Result<u64, WireError>);

/// Every operation gives the same bytes, results and errors at every
/// start offset 0..8.
pub fn offset_sweep() {
    let mut rng = SimRng::new(12);
    for _ in 0..1000 {
        let width = Width::ALL[rng.below(4) as usize];
        let v = random_value(&mut rng, width);
        let room = rng.below(10) as usize;
        let mut reference: Option<Observed> = None;
        for offset in 0..8 {
            let mut buf = vec![0u8; offset + room];
            let wrote = Writer::at(&mut buf, offset).write_uint(width, v);
            let read = Reader::at(&buf, offset).read_uint(width);
            let observed = (buf[offset..].to_vec(), wrote, read);
            match &reference {
                None => reference = Some(observed),
                Some(r) => assert_eq!(&observed, r, "offset {offset} width {width:?} room {room}"),
            }
        }
        let (_, wrote, _) = reference.unwrap();
        assert_eq!(wrote.is_ok(), room >= width.bytes());
    }
}

fn path(ids: &[u64]) -> Path {
    ids.iter()
        .map(|&i| NodeId(i))
        .fold(Path::new(), |mut p, n| {
            p.push(n).unwrap();
            p
        })
}

pub fn frame_vectors() {
    let cases: Vec<(Message, Vec<u8>)> = vec![
        (
            Message::Flood {
                originator: NodeId(0x0102),
                seq: 0x0304,
                ttl: 16,
                payload: b"hi",
            },
            vec![0x01, 0, 0, 0, 0, 0, 0, 1, 2, 3, 4, 16, b'h', b'i'],
        ),
        (
            Message::TreeBeacon {
                sink: NodeId(5),
                hops: 2,
            },
            vec![0x02, 0, 0, 0, 0, 0, 0, 0, 5, 2],
        ),
        (
            Message::TreeData {
                originator: NodeId(9),
                payload: &[0xaa],
            },
            vec![0x03, 0, 0, 0, 0, 0, 0, 0, 9, 0xaa],
        ),
        (
            Message::DsdvUpdate {
                routes: StaticVector::from_slice(&[AdvertisedRoute {
                    dest: NodeId(2),
                    next_hop: NodeId(1),
                    hops: 2,
                    seq: 0x0a0b_0c0d,
                }])
                .unwrap(),
            },
            vec![
                0x04, 0, 1, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 1, 0, 2, 0x0a, 0x0b, 0x0c,
                0x0d,
            ],
        ),
        (
            Message::DsdvData {
                origin: NodeId(1),
                dest: NodeId(3),
                ttl: 64,
                payload: &[7],
            },
            vec![0x05, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 3, 64, 7],
        ),
        (
            Message::DsrRequest {
                req_id: 0x0102,
                target: NodeId(4),
                path: path(&[0, 1]),
            },
            vec![
                0x06, 1, 2, 0, 0, 0, 0, 0, 0, 0, 4, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
                1,
            ],
        ),
        (
            Message::DsrReply {
                req_id: 1,
                target: NodeId(1),
                path: path(&[1, 0]),
            },
            vec![
                0x07, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 2, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0,
                0,
            ],
        ),
        (
            Message::DsrData {
                path: path(&[0, 2]),
                cursor: 1,
                payload: b"x",
            },
            vec![
                0x08, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 1, b'x',
            ],
        ),
        (
            Message::DsrAck {
                path: path(&[2, 0]),
                cursor: 1,
            },
            vec![0x09, 2, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 1],
        ),
        (
            Message::Secure {
                ciphertext: &[1, 2, 3],
            },
            vec![0x0a, 1, 2, 3],
        ),
    ];
    assert_eq!(cases.len(), MessageKind::ALL.len());
    for (msg, bytes) in cases {
        assert_eq!(
            msg.encode().unwrap().as_slice(),
            bytes.as_slice(),
            "{:?}",
            msg.kind()
        );
        assert_eq!(Message::decode(&bytes).unwrap(), msg);
    }
}

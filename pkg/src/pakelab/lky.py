"""The baseline verifier-based key agreement scheme ("lky" on the wire).

Three messages; group elements travel XOR-masked with the fixed-width
encoding of the verifier v:

  A -> B : id_A, T_A = g^x (+) v
  B -> A : T_B = v^y (+) v,  d_B = h(id_B, T_A, r)
  A -> B : d_A = h(id_A, T_B, r)

where r = g^(x*y) is reached from both ends: the server computes
(T_A (+) v)^y and the client (T_B (+) v)^(x * h^-1) with h^-1 the inverse
of the adjusted password hash mod q-1. Hash inputs T_A / T_B are the masked
transmitted integers, exactly as they appear on the wire. Both sides finish
with session key h(r) mod q.

This scheme is the workbench's broken baseline: anyone holding the stolen
verifier can run the client side with v as the exponentiation base and be
accepted (see pakelab.attacks.stolen_verifier_attack_lky).

State machines are deterministic: ephemeral exponents are injected by the
caller, so golden runs and attack scripts are reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    Credentials,
    GroupParams,
    HashSpec,
    SessionKey,
    Tally,
    VerifierRecord,
    derive_verifier,
    encode_residue,
    exponent_reduce,
    hash_to_exponent,
    mod_exp,
    mod_inverse,
)
from .errors import AuthFail, RetryNonce, UnknownIdentity, UnmaskOutOfRange

PHASE_STARTED = "started"
PHASE_RESPONDED = "responded"
PHASE_FINISHED = "finished"
PHASE_FAILED = "failed"


@dataclass(frozen=True)
class MaskedValue:
    """A group element XORed with v, as a fixed-width byte string.

    The content is unconstrained (masked integers may exceed q); only the
    width is pinned to q_byte_len. Hash inputs use the big-endian integer
    reading of these bytes.
    """

    data: bytes

    @property
    def as_int(self) -> int:
        return int.from_bytes(self.data, "big")

    def __len__(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class Msg1:
    id_a: int
    t_a_masked: MaskedValue


@dataclass(frozen=True)
class Msg2:
    t_b_masked: MaskedValue
    d_b: int


@dataclass(frozen=True)
class Msg3:
    d_a: int


def xor_mask(value: int, v: int, params: GroupParams) -> MaskedValue:
    """Bytewise XOR of the canonical encodings of a group element and v."""
    value_bytes = encode_residue(value, params)
    v_bytes = encode_residue(v, params)
    if not params.contains(value) or not params.contains(v):
        raise UnmaskOutOfRange("mask operands must lie in Z_q^*")
    return MaskedValue(bytes(a ^ b for a, b in zip(value_bytes, v_bytes)))


def xor_unmask(masked: MaskedValue, v: int, params: GroupParams) -> int:
    """Strip the verifier mask, rejecting anything outside Z_q^*.

    An all-zero masked value is refused outright: it can only arise from
    masking v with itself, which honest senders avoid by resampling, so
    receiving one signals a malformed or reflected message.
    """
    if len(masked) != params.q_byte_len:
        raise UnmaskOutOfRange(
            f"masked value has width {len(masked)}, expected {params.q_byte_len}")
    if masked.as_int == 0:
        raise UnmaskOutOfRange("all-zero masked value")
    value = masked.as_int ^ v
    if not params.contains(value):
        raise UnmaskOutOfRange(f"unmasked value {value} not in Z_q^*")
    return value


@dataclass
class LkyClientState:
    creds: Credentials
    params: GroupParams
    hash_spec: HashSpec
    v: int
    x: int = field(repr=False)          # ephemeral; never serialized
    t_a_masked: MaskedValue
    tally: Tally
    phase: str = PHASE_STARTED


@dataclass
class LkyServerState:
    record: VerifierRecord
    params: GroupParams
    hash_spec: HashSpec
    y: int = field(repr=False)          # ephemeral; never serialized
    t_a_masked: MaskedValue
    t_b_masked: MaskedValue
    r_b: int
    d_a_expected: int
    d_b: int
    tally: Tally
    phase: str = PHASE_RESPONDED


def lky_client_start(creds: Credentials, params: GroupParams, hash_spec: HashSpec,
                     x: int) -> tuple[Msg1, LkyClientState]:
    """Step 1: mask the ephemeral public value under the verifier.

    Raises RetryNonce when g^x equals v: the mask would be all zeros, which
    receivers reject, so the caller must resample x.
    """
    if not 1 <= x <= params.order - 1:
        raise ValueError(f"x must lie in [1, {params.order - 1}]")
    tally = Tally()
    v = derive_verifier(creds, params, hash_spec, tally)
    t_a = mod_exp(params.g, x, params, tally)
    if t_a == v:
        raise RetryNonce("g^x equals v; resample x")
    t_a_masked = xor_mask(t_a, v, params)
    state = LkyClientState(creds=creds, params=params, hash_spec=hash_spec, v=v,
                           x=x, t_a_masked=t_a_masked, tally=tally)
    return Msg1(id_a=creds.id_a, t_a_masked=t_a_masked), state


def lky_server_respond(msg1: Msg1, record: VerifierRecord, params: GroupParams,
                       hash_spec: HashSpec, y: int) -> tuple[Msg2, LkyServerState]:
    """Step 2: answer with the masked v^y and the server confirmation d_B.

    The server's expected client confirmation is fixed here, before any
    client response is read. Raises RetryNonce when v^y equals v (zero
    mask), mirroring the client-side rule.
    """
    if record.id_a != msg1.id_a:
        raise UnknownIdentity(f"no verifier on record for id_A={msg1.id_a}")
    if not 1 <= y <= params.order - 1:
        raise ValueError(f"y must lie in [1, {params.order - 1}]")
    tally = Tally()
    v = record.v
    t_a = xor_unmask(msg1.t_a_masked, v, params)
    v_y = mod_exp(v, y, params, tally)
    if v_y == v:
        raise RetryNonce("v^y equals v; resample y")
    t_b_masked = xor_mask(v_y, v, params)
    r_b = mod_exp(t_a, y, params, tally)
    d_a_expected = hash_spec.of_ints(
        [msg1.id_a, t_b_masked.as_int, r_b], tally)
    d_b = hash_spec.of_ints([record.id_b, msg1.t_a_masked.as_int, r_b], tally)
    state = LkyServerState(record=record, params=params, hash_spec=hash_spec, y=y,
                           t_a_masked=msg1.t_a_masked, t_b_masked=t_b_masked,
                           r_b=r_b, d_a_expected=d_a_expected, d_b=d_b, tally=tally)
    return Msg2(t_b_masked=t_b_masked, d_b=d_b), state


def lky_client_finish(msg2: Msg2, state: LkyClientState) -> tuple[Msg3, SessionKey]:
    """Steps 3 and 5: authenticate the server, emit d_A, derive the key.

    r is recovered as (v^y)^(x * h^-1) mod q, with the inverse taken mod
    q-1; it equals the server's (g^x)^y in every honest run.
    """
    if state.phase != PHASE_STARTED:
        raise AuthFail(f"client state is {state.phase}, expected {PHASE_STARTED}")
    params, creds, hash_spec = state.params, state.creds, state.hash_spec
    t_b = xor_unmask(msg2.t_b_masked, state.v, params)
    h_exp = hash_to_exponent(
        hash_spec.of_ints([creds.id_a, creds.id_b, creds.password], state.tally),
        params)
    exponent = exponent_reduce(state.x * mod_inverse(h_exp, params.order), params)
    r_a = mod_exp(t_b, exponent, params, state.tally)
    d_b_expected = hash_spec.of_ints(
        [creds.id_b, state.t_a_masked.as_int, r_a], state.tally)
    if msg2.d_b != d_b_expected:
        state.phase = PHASE_FAILED
        raise AuthFail("server confirmation d_B does not verify")
    d_a = hash_spec.of_ints([creds.id_a, msg2.t_b_masked.as_int, r_a], state.tally)
    key = SessionKey.from_value(
        hash_spec.of_ints([r_a], state.tally) % params.q, params)
    state.phase = PHASE_FINISHED
    return Msg3(d_a=d_a), key


def lky_server_finish(msg3: Msg3, state: LkyServerState) -> SessionKey:
    """Step 4: accept iff d_A matches the precomputed expectation."""
    if state.phase != PHASE_RESPONDED:
        raise AuthFail(f"server state is {state.phase}, expected {PHASE_RESPONDED}")
    if msg3.d_a != state.d_a_expected:
        state.phase = PHASE_FAILED
        raise AuthFail("client confirmation d_A does not verify")
    key = SessionKey.from_value(
        state.hash_spec.of_ints([state.r_b], state.tally) % state.params.q,
        state.params)
    state.phase = PHASE_FINISHED
    return key

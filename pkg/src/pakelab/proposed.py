"""The proposed verifier-typed key agreement scheme under study.

A four-message revision of the LKY baseline: the client's ephemeral value
travels unmasked, the server proves itself with a squared-exponent token
checked through a bilinear map, and both confirmations bind the shared
secret g^(x*y) directly:

  A -> B : id_A, T_A = g^x mod q
  B -> A : T_B = v^y mod q
  A -> B : d_A = h(r) mod q          with r = T_B^(x * h^-1) = g^(x*y)
  B -> A : E_B = v^(y^2) mod q       after checking d_A = F_A

The server accepts via F_A = h(T_A^y mod q) mod q, which equals h(g^(x*y))
for any hash function. The client authenticates the server by checking

  e(E_B, T_A) = e(T_B, r)

an identity for honest runs (both sides carry h*x*y^2 in the exponent).
The check as it is sometimes stated, e(E_B, g) = e(T_B, r), is NOT an
identity -- on the workbench's toy run it evaluates to 4 vs 0 -- so this
module implements the minimal correction (g replaced by T_A) and keeps the
uncorrected form available for the analysis harness. The map e exists here
only as the desk-scale dlog-product oracle; large groups must either skip
server authentication explicitly or fail with GroupTooLarge.

Both parties finish with session key h(id_A, id_B, g^(x*y)) mod q. Group
elements are reduced mod q before hashing, so transcripts are canonical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    Credentials,
    DlogTable,
    GroupParams,
    HashSpec,
    SessionKey,
    Tally,
    VerifierRecord,
    exponent_reduce,
    hash_to_exponent,
    mod_exp,
    mod_inverse,
    toy_pairing,
)
from .errors import AuthFail, NotInGroup, UnknownIdentity

PHASE_STARTED = "started"
PHASE_CONFIRMED = "confirmed"
PHASE_RESPONDED = "responded"
PHASE_FINISHED = "finished"
PHASE_FAILED = "failed"

FLAG_DEGENERATE_TB = "degenerate T_B"
FLAG_UNAUTHENTICATED = "server unauthenticated"


@dataclass(frozen=True)
class Msg1:
    id_a: int
    t_a: int


@dataclass(frozen=True)
class Msg2:
    t_b: int


@dataclass(frozen=True)
class Msg3:
    d_a: int


@dataclass(frozen=True)
class Msg4:
    e_b: int


@dataclass
class PropClientState:
    creds: Credentials
    params: GroupParams
    hash_spec: HashSpec
    v: int
    h_exp: int
    x: int = field(repr=False)          # ephemeral; never serialized
    t_a: int
    tally: Tally
    t_b: int = 0
    r: int = 0                          # defined once phase >= confirmed
    flags: list = field(default_factory=list)
    phase: str = PHASE_STARTED


@dataclass
class PropServerState:
    record: VerifierRecord
    params: GroupParams
    hash_spec: HashSpec
    y: int = field(repr=False)          # ephemeral; never serialized
    t_a: int
    t_b: int
    tally: Tally
    f_a: int = 0                        # fixed before the client's d_A is read
    e_b: int = 0
    key: Optional[SessionKey] = None
    phase: str = PHASE_RESPONDED


def prop_client_start(creds: Credentials, params: GroupParams, hash_spec: HashSpec,
                      x: int) -> tuple[Msg1, PropClientState]:
    """Step 1: send T_A = g^x unmasked; cache the invertible password exponent."""
    if not 1 <= x <= params.order - 1:
        raise ValueError(f"x must lie in [1, {params.order - 1}]")
    tally = Tally()
    raw = hash_spec.of_ints([creds.id_a, creds.id_b, creds.password], tally)
    h_exp = hash_to_exponent(raw, params)
    v = mod_exp(params.g, h_exp, params, tally, registration=True)
    t_a = mod_exp(params.g, x, params, tally)
    state = PropClientState(creds=creds, params=params, hash_spec=hash_spec,
                            v=v, h_exp=h_exp, x=x, t_a=t_a, tally=tally)
    return Msg1(id_a=creds.id_a, t_a=t_a), state


def prop_server_respond(msg1: Msg1, record: VerifierRecord, params: GroupParams,
                        hash_spec: HashSpec, y: int) -> tuple[Msg2, PropServerState]:
    """Step 2: answer with T_B = v^y.

    y is capped at q-2 so that T_B = 1 cannot arise honestly (v is always a
    generator, so v^y = 1 only at multiples of q-1).
    """
    if record.id_a != msg1.id_a:
        raise UnknownIdentity(f"no verifier on record for id_A={msg1.id_a}")
    if not 1 <= y <= params.order - 1:
        raise ValueError(f"y must lie in [1, {params.order - 1}]")
    if not params.contains(msg1.t_a):
        raise NotInGroup(f"T_A = {msg1.t_a} not in Z_q^*")
    tally = Tally()
    t_b = mod_exp(record.v, y, params, tally)
    state = PropServerState(record=record, params=params, hash_spec=hash_spec,
                            y=y, t_a=msg1.t_a, t_b=t_b, tally=tally)
    return Msg2(t_b=t_b), state


def prop_client_confirm(msg2: Msg2, state: PropClientState) -> Msg3:
    """Step 3: recover r = T_B^(x * h^-1) = g^(x*y) and confirm with d_A = h(r) mod q.

    A received T_B of 1 collapses r to 1 for every x; the run proceeds but
    is flagged as degenerate in the state (and so in the session report).
    """
    if state.phase != PHASE_STARTED:
        raise AuthFail(f"client state is {state.phase}, expected {PHASE_STARTED}")
    params = state.params
    if not params.contains(msg2.t_b):
        raise NotInGroup(f"T_B = {msg2.t_b} not in Z_q^*")
    if msg2.t_b == 1:
        state.flags.append(FLAG_DEGENERATE_TB)
    exponent = exponent_reduce(
        state.x * mod_inverse(state.h_exp, params.order), params)
    state.t_b = msg2.t_b
    state.r = mod_exp(msg2.t_b, exponent, params, state.tally)
    d_a = state.hash_spec.of_ints([state.r], state.tally) % params.q
    state.phase = PHASE_CONFIRMED
    return Msg3(d_a=d_a)


def prop_server_finish(msg3: Msg3, state: PropServerState) -> tuple[Msg4, SessionKey]:
    """Step 4: check d_A against F_A = h(T_A^y mod q) mod q, then release E_B.

    F_A equals the honest client's h(g^(x*y)) mod q for every hash mode.
    E_B = v^(y^2) (exponent reduced mod q-1) rides back in a fourth message
    so the client can run its server-authentication check.
    """
    if state.phase != PHASE_RESPONDED:
        raise AuthFail(f"server state is {state.phase}, expected {PHASE_RESPONDED}")
    params, hash_spec = state.params, state.hash_spec
    shared = mod_exp(state.t_a, state.y, params, state.tally)
    state.f_a = hash_spec.of_ints([shared], state.tally) % params.q
    if msg3.d_a != state.f_a:
        state.phase = PHASE_FAILED
        raise AuthFail("client confirmation d_A does not match F_A")
    state.e_b = mod_exp(state.record.v,
                        exponent_reduce(state.y * state.y, params),
                        params, state.tally)
    key_value = hash_spec.of_ints(
        [state.record.id_a, state.record.id_b, shared], state.tally) % params.q
    state.key = SessionKey.from_value(key_value, params)
    state.phase = PHASE_FINISHED
    return Msg4(e_b=state.e_b), state.key


def prop_client_finish(msg4: Msg4, state: PropClientState,
                       pairing: Optional[DlogTable] = None,
                       skip_server_auth: bool = False) -> SessionKey:
    """Step 5: authenticate the server via e(E_B, T_A) = e(T_B, r), derive the key.

    The pairing runs on the desk-scale dlog oracle; pass a prebuilt table to
    amortize construction, or set skip_server_auth for large groups (the
    skip is recorded as a state flag). Raises GroupTooLarge when the oracle
    is unavailable and the check was not explicitly disabled.
    """
    if state.phase != PHASE_CONFIRMED:
        raise AuthFail(f"client state is {state.phase}, expected {PHASE_CONFIRMED}")
    params = state.params
    if not params.contains(msg4.e_b):
        raise NotInGroup(f"E_B = {msg4.e_b} not in Z_q^*")
    if skip_server_auth:
        state.flags.append(FLAG_UNAUTHENTICATED)
    else:
        table = pairing if pairing is not None else DlogTable.for_params(params)
        left = (table.dlog(msg4.e_b) * table.dlog(state.t_a)) % params.order
        right = (table.dlog(state.t_b) * table.dlog(state.r)) % params.order
        if left != right:
            state.phase = PHASE_FAILED
            raise AuthFail(
                f"server authentication failed: e(E_B, T_A) = {left} != {right} = e(T_B, r)")
    key_value = state.hash_spec.of_ints(
        [state.creds.id_a, state.creds.id_b, state.r], state.tally) % params.q
    state.phase = PHASE_FINISHED
    return SessionKey.from_value(key_value, params)


def uncorrected_server_auth_check(e_b: int, t_b: int, r: int,
                                  params: GroupParams) -> tuple[int, int]:
    """Evaluate the server-auth check in its uncorrected form e(E_B, g) vs e(T_B, r).

    Returns both sides so analysis code can exhibit that the identity fails
    even on honest runs (toy golden run: 4 vs 0). The protocol itself uses
    the corrected check in prop_client_finish.
    """
    return (toy_pairing(e_b, params.g, params), toy_pairing(t_b, r, params))

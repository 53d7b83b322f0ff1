"""Executable adversaries for both schemes.

Four experiments, all deterministic given their injected nonces:

  * stolen_verifier_attack_lky: impersonate the client against the baseline
    scheme using only the stolen verifier v. Substituting v for g as the
    exponentiation base makes the two sides' secrets coincide (v^(x'y) from
    both ends), so the attack succeeds for every nonce pair with v^x' != v.
  * stolen_verifier_attack_proposed: the same substitution against the
    revised scheme. T_A^y = (v^x')^y = (v^y)^x' = T_B^x' identically, so
    the server's check passes here too; the report records the measured
    outcome next to the scheme's claimed resistance so the tension stays
    visible instead of being asserted away.
  * dictionary_census: information-theoretic offline-guess measurement. A
    candidate password is "consistent" with a wiretapped transcript iff
    some nonce pair (x', y') explains every observed value under that
    password's verifier. Exhaustive by construction; desk scale only.
  * mitm_tamper_experiment: replay an honest session with one in-flight
    field substitution and report who, if anyone, accepted.

No function here ever reads a victim's password; attackers hold at most
the verifier, the transcript, and a guess list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import lky, proposed
from .core import (
    DESK_SCALE_BOUND,
    Credentials,
    DlogTable,
    GroupParams,
    HashSpec,
    SCHEME_LKY,
    SCHEME_PROPOSED,
    SessionKey,
    VerifierRecord,
    derive_verifier,
    exponent_reduce,
    hash_to_exponent,
    mod_exp,
    mod_inverse,
)
from .errors import (
    AuthFail,
    GroupTooLarge,
    PakeError,
    ScenarioError,
    UnmaskOutOfRange,
)
from .netio.frames import (
    LkyMsg2Frame,
    Msg1Frame,
    Msg2Frame,
    Msg3Frame,
    Msg4Frame,
    decode_frame,
    encode_frame,
    frame_label,
)
from .transcript import DIR_AB, DIR_BA, Transcript

ATTACK_STOLEN_VERIFIER_LKY = "stolen-verifier-lky"
ATTACK_STOLEN_VERIFIER_PROPOSED = "stolen-verifier-proposed"
ATTACK_MITM = "mitm"
ATTACK_CENSUS = "census"

# What the revised scheme is advertised to withstand; printed verbatim next
# to measured verdicts so reports never conflate claim and observation.
PROPOSED_RESISTANCE_CLAIM = "claimed: verifier theft alone does not let an attacker authenticate as the client"


@dataclass
class AttackReport:
    scheme: str
    attack: str
    succeeded: bool
    attacker_key: Optional[SessionKey]
    victim_key: Optional[SessionKey]
    transcript: Transcript
    notes: str = ""

    def __post_init__(self):
        # impersonation semantics: a key is learned exactly on success
        if self.succeeded and self.attacker_key is None:
            raise ValueError("succeeded implies attacker_key")
        if not self.succeeded and self.attacker_key is not None:
            raise ValueError("attacker_key implies succeeded")


@dataclass
class DictionaryCensus:
    dictionary: List[int]
    consistent: List[int]
    enumeration_bound: int
    method: str
    witnesses: Dict[int, Tuple[int, int]] = field(default_factory=dict)
    rejections: Dict[int, str] = field(default_factory=dict)


@dataclass(frozen=True)
class TamperSpec:
    """One in-flight substitution: the named message field becomes value."""

    field: str
    value: int


def _record(transcript: Transcript, direction: str, frame) -> None:
    transcript.record(direction, frame_label(frame), encode_frame(frame))


def stolen_verifier_attack_lky(v: int, ids: Tuple[int, int], params: GroupParams,
                               hash_spec: HashSpec, x_attacker: int, y_server: int,
                               server_record: Optional[VerifierRecord] = None,
                               ) -> AttackReport:
    """Impersonate the client in the baseline scheme with a stolen verifier.

    The attacker sends T_A = v^x' (+) v. The server unmasks to v^x' and
    computes r_B = v^(x'y); the attacker reaches the same point as
    (unmasked T_B)^x' = v^(x'y) without ever holding the password. Pass a
    different server_record to model an attacker whose copy of v is stale
    or guessed; mismatched copies fail.
    """
    id_a, id_b = ids
    record = server_record if server_record is not None else VerifierRecord(
        id_a=id_a, id_b=id_b, v=v)
    transcript = Transcript()
    notes: List[str] = ["attacker holds v only; base of T_A is v"]

    base_value = mod_exp(v, x_attacker, params)
    try:
        t_a_masked = lky.xor_mask(base_value, v, params)
    except UnmaskOutOfRange as exc:
        return AttackReport(scheme=SCHEME_LKY, attack=ATTACK_STOLEN_VERIFIER_LKY,
                            succeeded=False, attacker_key=None, victim_key=None,
                            transcript=transcript,
                            notes=f"aborted before send: {exc}")
    msg1 = lky.Msg1(id_a=id_a, t_a_masked=t_a_masked)
    _record(transcript, DIR_AB,
            Msg1Frame(q=params.q, g=params.g, id_a=id_a, t_a=t_a_masked.as_int))

    try:
        msg2, server = lky.lky_server_respond(msg1, record, params, hash_spec,
                                              y_server)
    except PakeError as exc:
        return AttackReport(scheme=SCHEME_LKY, attack=ATTACK_STOLEN_VERIFIER_LKY,
                            succeeded=False, attacker_key=None, victim_key=None,
                            transcript=transcript,
                            notes=f"server rejected Msg1: {exc}")
    _record(transcript, DIR_BA,
            LkyMsg2Frame(t_b_masked=msg2.t_b_masked.as_int, d_b=msg2.d_b))

    try:
        t_b = lky.xor_unmask(msg2.t_b_masked, v, params)
    except UnmaskOutOfRange as exc:
        return AttackReport(scheme=SCHEME_LKY, attack=ATTACK_STOLEN_VERIFIER_LKY,
                            succeeded=False, attacker_key=None, victim_key=None,
                            transcript=transcript,
                            notes=f"attacker could not unmask T_B: {exc}")
    r_attacker = mod_exp(t_b, x_attacker, params)
    d_b_expected = hash_spec.of_ints([id_b, t_a_masked.as_int, r_attacker])
    if msg2.d_b != d_b_expected:
        notes.append("server confirmation d_B did not verify on the attacker side")
    d_a = hash_spec.of_ints([id_a, msg2.t_b_masked.as_int, r_attacker])
    _record(transcript, DIR_AB, Msg3Frame(d_a=d_a))

    try:
        victim_key = lky.lky_server_finish(lky.Msg3(d_a=d_a), server)
    except AuthFail as exc:
        return AttackReport(scheme=SCHEME_LKY, attack=ATTACK_STOLEN_VERIFIER_LKY,
                            succeeded=False, attacker_key=None, victim_key=None,
                            transcript=transcript,
                            notes="; ".join(notes + [f"server rejected d_A: {exc}"]))
    attacker_key = SessionKey.from_value(
        hash_spec.of_ints([r_attacker]) % params.q, params)
    notes.append("server accepted; keys "
                 + ("match" if attacker_key == victim_key else "differ"))
    return AttackReport(scheme=SCHEME_LKY, attack=ATTACK_STOLEN_VERIFIER_LKY,
                        succeeded=True, attacker_key=attacker_key,
                        victim_key=victim_key, transcript=transcript,
                        notes="; ".join(notes))


def stolen_verifier_attack_proposed(v: int, ids: Tuple[int, int],
                                    params: GroupParams, hash_spec: HashSpec,
                                    x_attacker: int, y_server: int,
                                    server_record: Optional[VerifierRecord] = None,
                                    attacker_base: Optional[int] = None,
                                    ) -> AttackReport:
    """Run the verifier-substitution attack against the revised scheme.

    With attacker_base left at v, T_A = v^x' and the server's acceptance
    test compares h(T_A^y) with the attacker's h(T_B^x'): both exponents
    are x'y over base v, so the measured outcome is acceptance. Passing
    attacker_base=g models an attacker without v, whose confirmation is
    computed over v^(x'y) while the server checks g^(x'y); those disagree
    except at degenerate nonce pairs.
    """
    id_a, id_b = ids
    record = server_record if server_record is not None else VerifierRecord(
        id_a=id_a, id_b=id_b, v=v)
    base = attacker_base if attacker_base is not None else v
    transcript = Transcript()
    notes: List[str] = [PROPOSED_RESISTANCE_CLAIM,
                        f"attacker base for T_A is {'v' if base == v else base}"]

    t_a = mod_exp(base, x_attacker, params)
    msg1 = proposed.Msg1(id_a=id_a, t_a=t_a)
    _record(transcript, DIR_AB,
            Msg1Frame(q=params.q, g=params.g, id_a=id_a, t_a=t_a))

    try:
        msg2, server = proposed.prop_server_respond(msg1, record, params,
                                                    hash_spec, y_server)
    except PakeError as exc:
        return AttackReport(scheme=SCHEME_PROPOSED,
                            attack=ATTACK_STOLEN_VERIFIER_PROPOSED,
                            succeeded=False, attacker_key=None, victim_key=None,
                            transcript=transcript,
                            notes=f"server rejected Msg1: {exc}")
    _record(transcript, DIR_BA, Msg2Frame(t_b=msg2.t_b))

    # attacker's stand-in for r = g^(x*y): exponentiate T_B by its own nonce
    r_attacker = mod_exp(msg2.t_b, x_attacker, params)
    d_a = hash_spec.of_ints([r_attacker]) % params.q
    _record(transcript, DIR_AB, Msg3Frame(d_a=d_a))

    try:
        msg4, victim_key = proposed.prop_server_finish(proposed.Msg3(d_a=d_a),
                                                       server)
    except AuthFail as exc:
        return AttackReport(scheme=SCHEME_PROPOSED,
                            attack=ATTACK_STOLEN_VERIFIER_PROPOSED,
                            succeeded=False, attacker_key=None, victim_key=None,
                            transcript=transcript,
                            notes="; ".join(notes + [
                                f"measured: server rejected d_A ({exc})"]))
    _record(transcript, DIR_BA, Msg4Frame(e_b=msg4.e_b))
    attacker_key = SessionKey.from_value(
        hash_spec.of_ints([id_a, id_b, r_attacker]) % params.q, params)
    notes.append("measured: server accepted the impersonation; keys "
                 + ("match" if attacker_key == victim_key else "differ"))
    if params.q <= DESK_SCALE_BOUND:
        table = DlogTable.for_params(params)
        left = (table.dlog(msg4.e_b) * table.dlog(t_a)) % params.order
        right = (table.dlog(msg2.t_b) * table.dlog(r_attacker)) % params.order
        notes.append("attacker-side server-auth check "
                     + ("passes" if left == right else "fails"))
    return AttackReport(scheme=SCHEME_PROPOSED,
                        attack=ATTACK_STOLEN_VERIFIER_PROPOSED,
                        succeeded=True, attacker_key=attacker_key,
                        victim_key=victim_key, transcript=transcript,
                        notes="; ".join(notes))


def _census_observations(transcript: Transcript, params: GroupParams):
    """Pull (id_a, T_A, T_B, d_A, E_B) out of a wiretapped session."""
    seen = {}
    for entry in transcript:
        frame = decode_frame(entry.data)
        if isinstance(frame, Msg1Frame):
            if (frame.q, frame.g) != (params.q, params.g):
                raise ScenarioError(
                    f"transcript params ({frame.q}, {frame.g}) do not match "
                    f"({params.q}, {params.g})")
            seen["id_a"] = frame.id_a
            seen["t_a"] = frame.t_a
        elif isinstance(frame, Msg2Frame):
            seen["t_b"] = frame.t_b
        elif isinstance(frame, Msg3Frame):
            seen["d_a"] = frame.d_a
        elif isinstance(frame, Msg4Frame):
            seen["e_b"] = frame.e_b
    missing = {"id_a", "t_a", "t_b", "d_a", "e_b"} - set(seen)
    if missing:
        raise ScenarioError(
            f"transcript is not a completed session; missing {sorted(missing)}")
    return seen


def dictionary_census(transcript: Transcript, dictionary: List[int],
                      params: GroupParams, hash_spec: HashSpec, id_b: int,
                      method: str = "enumerate") -> DictionaryCensus:
    """Mark each candidate password consistent or not with a wiretap.

    A candidate P' is consistent iff some (x', y') in [1, q-2]^2 satisfies,
    under v' = g^(adjusted h(id_A, id_B, P')):

        g^x' = T_A,  v'^y' = T_B,
        h(T_A^y') mod q = d_A,  h(T_B^(x' * h'^-1)) mod q = d_A,
        v'^(y'^2 mod (q-1)) = E_B

    method "enumerate" walks the whole space (skipping x' columns whose
    g^x' misses T_A, which discards no witness); method "dlog" resolves
    x' and y' directly from the dlog table, an algebraically equivalent
    route kept as a cross-check. id_b is supplied by the caller because
    the wire only ever carries id_a.

    This measures information leakage with unlimited computation, not the
    cost of extracting it.
    """
    obs = _census_observations(transcript, params)
    bound = (params.q - 2) ** 2
    if params.q > DESK_SCALE_BOUND:
        raise GroupTooLarge(
            f"census needs q <= {DESK_SCALE_BOUND}, got {params.q}")
    if method not in ("enumerate", "dlog"):
        raise ValueError(f"unknown census method {method!r}")
    census = DictionaryCensus(dictionary=list(dictionary), consistent=[],
                              enumeration_bound=bound, method=method)
    for password in dictionary:
        witness, why = _census_one(obs, password, params, hash_spec, id_b, method)
        if witness is not None:
            census.consistent.append(password)
            census.witnesses[password] = witness
        else:
            census.rejections[password] = why
    return census


def _census_one(obs, password: int, params: GroupParams, hash_spec: HashSpec,
                id_b: int, method: str):
    q, order = params.q, params.order
    h_exp = hash_to_exponent(
        hash_spec.of_ints([obs["id_a"], id_b, password]), params)
    v_cand = mod_exp(params.g, h_exp, params)
    h_inv = mod_inverse(h_exp, order)
    t_a, t_b, d_a, e_b = obs["t_a"], obs["t_b"], obs["d_a"], obs["e_b"]

    def pair_ok(x_c: int, y_c: int) -> bool:
        if hash_spec.of_ints([mod_exp(t_a, y_c, params)]) % q != d_a:
            return False
        client_r = mod_exp(t_b, exponent_reduce(x_c * h_inv, params), params)
        if hash_spec.of_ints([client_r]) % q != d_a:
            return False
        return mod_exp(v_cand, exponent_reduce(y_c * y_c, params), params) == e_b

    if method == "enumerate":
        for x_c in range(1, q - 1):
            if mod_exp(params.g, x_c, params) != t_a:
                continue
            for y_c in range(1, q - 1):
                if mod_exp(v_cand, y_c, params) != t_b:
                    continue
                if pair_ok(x_c, y_c):
                    return (x_c, y_c), ""
        return None, "no (x', y') satisfies all transcript equations"

    table = DlogTable.for_params(params)
    x_c = table.dlog(t_a)
    if not 1 <= x_c <= q - 2:
        return None, "T_A has no admissible discrete log"
    y_c = (table.dlog(t_b) * h_inv) % order
    if not 1 <= y_c <= q - 2:
        return None, "T_B has no admissible nonce under this password"
    if pair_ok(x_c, y_c):
        return (x_c, y_c), ""
    return None, "unique nonce pair fails the confirmation equations"


def mitm_tamper_experiment(scheme: str, tamper: TamperSpec, params: GroupParams,
                           hash_spec: HashSpec, nonces: Tuple[int, int],
                           creds: Credentials) -> AttackReport:
    """Substitute one field in flight during an honest run; see who notices.

    The attacker holds neither the password nor the verifier; all it can do
    is rewrite a message, so it never ends up authenticated as the client
    and succeeded is always False. What varies is WHO rejects (recorded in
    notes), or, for an identity substitution, that the session completes
    normally. Were a genuinely changed value ever accepted end to end, the
    notes would carry a loud TAMPER ACCEPTED marker. The transcript records
    the post-tamper wire view.
    """
    if tamper.value < 0:
        raise ScenarioError("tamper values must be nonnegative wire integers")
    x, y = nonces
    if scheme == SCHEME_PROPOSED:
        return _mitm_proposed(tamper, params, hash_spec, x, y, creds)
    if scheme == SCHEME_LKY:
        return _mitm_lky(tamper, params, hash_spec, x, y, creds)
    raise ScenarioError(f"unknown scheme {scheme!r}")


def _tampered(tamper: TamperSpec, name: str, value: int,
              notes: List[str]) -> int:
    if tamper.field != name:
        return value
    if tamper.value == value:
        notes.append(f"identity substitution on {name}; wire value unchanged")
    else:
        notes.append(f"replaced {name} = {value} with {tamper.value} in flight")
    return tamper.value


def _fail_report(scheme: str, transcript: Transcript, notes: List[str],
                 who: str, exc: Exception) -> AttackReport:
    return AttackReport(scheme=scheme, attack=ATTACK_MITM, succeeded=False,
                        attacker_key=None, victim_key=None, transcript=transcript,
                        notes="; ".join(notes + [f"{who} rejected: {exc}"]))


def _mitm_proposed(tamper: TamperSpec, params: GroupParams, hash_spec: HashSpec,
                   x: int, y: int, creds: Credentials) -> AttackReport:
    if tamper.field not in ("t_a", "t_b", "d_a", "e_b"):
        raise ScenarioError(f"no such field in this scheme: {tamper.field!r}")
    record = VerifierRecord(id_a=creds.id_a, id_b=creds.id_b,
                            v=derive_verifier(creds, params, hash_spec))
    transcript = Transcript()
    notes: List[str] = []

    msg1, client = proposed.prop_client_start(creds, params, hash_spec, x)
    t_a_wire = _tampered(tamper, "t_a", msg1.t_a, notes)
    _record(transcript, DIR_AB,
            Msg1Frame(q=params.q, g=params.g, id_a=msg1.id_a, t_a=t_a_wire))
    try:
        msg2, server = proposed.prop_server_respond(
            proposed.Msg1(id_a=msg1.id_a, t_a=t_a_wire), record, params,
            hash_spec, y)
    except PakeError as exc:
        return _fail_report(SCHEME_PROPOSED, transcript, notes, "server", exc)

    t_b_wire = _tampered(tamper, "t_b", msg2.t_b, notes)
    _record(transcript, DIR_BA, Msg2Frame(t_b=t_b_wire))
    try:
        msg3 = proposed.prop_client_confirm(proposed.Msg2(t_b=t_b_wire), client)
    except PakeError as exc:
        return _fail_report(SCHEME_PROPOSED, transcript, notes, "client", exc)

    d_a_wire = _tampered(tamper, "d_a", msg3.d_a, notes)
    _record(transcript, DIR_AB, Msg3Frame(d_a=d_a_wire))
    try:
        msg4, server_key = proposed.prop_server_finish(
            proposed.Msg3(d_a=d_a_wire), server)
    except PakeError as exc:
        return _fail_report(SCHEME_PROPOSED, transcript, notes, "server", exc)

    e_b_wire = _tampered(tamper, "e_b", msg4.e_b, notes)
    _record(transcript, DIR_BA, Msg4Frame(e_b=e_b_wire))
    try:
        client_key = proposed.prop_client_finish(
            proposed.Msg4(e_b=e_b_wire), client,
            skip_server_auth=params.q > DESK_SCALE_BOUND)
    except PakeError as exc:
        return _fail_report(SCHEME_PROPOSED, transcript, notes, "client", exc)

    return _mitm_completed(SCHEME_PROPOSED, tamper, transcript, notes,
                           client_key, server_key)


def _fit_masked(value: int, params: GroupParams) -> bytes:
    if value >= 256 ** params.q_byte_len:
        raise ScenarioError(
            f"tamper value {value} does not fit a {params.q_byte_len}-byte "
            "masked field")
    return value.to_bytes(params.q_byte_len, "big")


def _mitm_lky(tamper: TamperSpec, params: GroupParams, hash_spec: HashSpec,
              x: int, y: int, creds: Credentials) -> AttackReport:
    if tamper.field not in ("t_a_masked", "t_b_masked", "d_b", "d_a"):
        raise ScenarioError(f"no such field in this scheme: {tamper.field!r}")
    transcript = Transcript()
    notes: List[str] = []

    msg1, client = lky.lky_client_start(creds, params, hash_spec, x)
    record = VerifierRecord(id_a=creds.id_a, id_b=creds.id_b, v=client.v)
    t_a_int = _tampered(tamper, "t_a_masked", msg1.t_a_masked.as_int, notes)
    t_a_wire = lky.MaskedValue(_fit_masked(t_a_int, params))
    _record(transcript, DIR_AB,
            Msg1Frame(q=params.q, g=params.g, id_a=msg1.id_a, t_a=t_a_int))
    try:
        msg2, server = lky.lky_server_respond(
            lky.Msg1(id_a=msg1.id_a, t_a_masked=t_a_wire), record, params,
            hash_spec, y)
    except PakeError as exc:
        return _fail_report(SCHEME_LKY, transcript, notes, "server", exc)

    t_b_int = _tampered(tamper, "t_b_masked", msg2.t_b_masked.as_int, notes)
    t_b_wire = lky.MaskedValue(_fit_masked(t_b_int, params))
    d_b_wire = _tampered(tamper, "d_b", msg2.d_b, notes)
    _record(transcript, DIR_BA, LkyMsg2Frame(t_b_masked=t_b_int, d_b=d_b_wire))
    try:
        msg3, client_key = lky.lky_client_finish(
            lky.Msg2(t_b_masked=t_b_wire, d_b=d_b_wire), client)
    except PakeError as exc:
        return _fail_report(SCHEME_LKY, transcript, notes, "client", exc)

    d_a_wire = _tampered(tamper, "d_a", msg3.d_a, notes)
    _record(transcript, DIR_AB, Msg3Frame(d_a=d_a_wire))
    try:
        server_key = lky.lky_server_finish(lky.Msg3(d_a=d_a_wire), server)
    except PakeError as exc:
        return _fail_report(SCHEME_LKY, transcript, notes, "server", exc)

    return _mitm_completed(SCHEME_LKY, tamper, transcript, notes,
                           client_key, server_key)


def _mitm_completed(scheme: str, tamper: TamperSpec, transcript: Transcript,
                    notes: List[str], client_key: SessionKey,
                    server_key: SessionKey) -> AttackReport:
    changed = any(n.startswith("replaced") for n in notes)
    notes.append("session completed; keys "
                 + ("match" if client_key == server_key else "differ"))
    if changed:
        # an accepted, genuinely altered run; surfaced loudly, never expected
        notes.append("TAMPER ACCEPTED: substitution went unnoticed")
    return AttackReport(scheme=scheme, attack=ATTACK_MITM, succeeded=False,
                        attacker_key=None, victim_key=server_key,
                        transcript=transcript, notes="; ".join(notes))

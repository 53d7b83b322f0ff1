"""What a leaked verifier file buys an attacker, scheme by scheme.

The attacker in both experiments holds v and nothing else: no password, no
dictionary, no session to replay. Against the baseline that is already
enough. The revised scheme is advertised as closing this hole; the second
half measures that story instead of repeating it.
"""

import random

from pakelab.attacks import stolen_verifier_attack_lky, stolen_verifier_attack_proposed
from pakelab.core import TOY_CREDS, TOY_PARAMS, TOYSUM, HashSpec, derive_verifier

params, creds = TOY_PARAMS, TOY_CREDS
spec = HashSpec(TOYSUM)
v = derive_verifier(creds, params, spec)
ids = (creds.id_a, creds.id_b)

print(f"attacker's haul: one stolen store record, v = {v} (q={params.q}, g={params.g})")

# ---- baseline: substitute v for g and walk straight in -----------------------------

print("\n--- baseline scheme ---")
report = stolen_verifier_attack_lky(v, ids, params, spec, x_attacker=5, y_server=4)
print(f"attacker sends T_A = v^5 (+) v instead of g^x (+) v")
print(f"server accepted: {report.succeeded}")
print(f"keys: attacker={report.attacker_key.value}, server={report.victim_key.value}")

wins = 0
for trial in range(100):
    rng = random.Random(trial)
    r = stolen_verifier_attack_lky(v, ids, params, spec,
                                   x_attacker=rng.randrange(2, params.q - 1),
                                   y_server=rng.randrange(2, params.q - 1))
    wins += r.succeeded and r.attacker_key == r.victim_key
print(f"sweep: {wins}/100 random-nonce impersonations accepted")

# ---- revised scheme: the same trick, measured against the headline ------------------

print("\n--- revised scheme ---")
report = stolen_verifier_attack_proposed(v, ids, params, spec,
                                         x_attacker=5, y_server=4)
print(f"attacker sends T_A = v^5; the server cannot tell it from g^x")
print(f"server accepted: {report.succeeded}")
print(f"notes: {report.notes}")

# an attacker who does NOT hold v is a different story: guessing the base
# g and hoping rarely survives the confirmation check
print("\nwithout v (base g, honest-looking guess):")
report = stolen_verifier_attack_proposed(v, ids, params, spec,
                                         x_attacker=3, y_server=5,
                                         attacker_base=params.g)
print(f"server accepted: {report.succeeded}")
print(f"notes: {report.notes}")

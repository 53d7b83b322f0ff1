"""Run the whole thing over TCP: enroll, agree on a key, get refused, get
throttled.

One process, two roles: the server thread owns the verifier store and the
failure counters; the client side speaks the length-prefixed frame protocol
through an honest-to-goodness socket. Both sides append JSONL session logs
to show they saw the same bytes.
"""

import json
import tempfile
from pathlib import Path

from pakelab.core import TOY_CREDS, TOY_PARAMS, TOYSUM, Credentials, HashSpec, derive_verifier
from pakelab.errors import RemoteError
from pakelab.netio.service import ClientOptions, ServeConfig, Service, client_connect
from pakelab.netio.store import VerifierRecord, VerifierStore

spec = HashSpec(TOYSUM)
workdir = Path(tempfile.mkdtemp(prefix="pakelab-demo-"))
store_path = workdir / "verifiers.tsv"

# enroll A with B ahead of time; the store keeps v, never the password
store = VerifierStore()
store.add(VerifierRecord(id_a=TOY_CREDS.id_a, id_b=TOY_CREDS.id_b,
                         v=derive_verifier(TOY_CREDS, TOY_PARAMS, spec)))
store.save(store_path)
print(f"store: {store_path}")
print(store_path.read_text())

config = ServeConfig(params=TOY_PARAMS, store_path=store_path,
                     listen=("127.0.0.1", 0), hash_spec=spec, max_fail=3,
                     log_path=workdir / "server.jsonl", y_override=4)

with Service(config) as service:
    host, port = service.address
    print(f"serving on {host}:{port}\n")

    # honest client
    key, report = client_connect(service.address, TOY_CREDS, TOY_PARAMS,
                                 ClientOptions(hash_spec=spec, x=3,
                                               log_path=workdir / "client.jsonl"))
    print(f"honest run: key = {key.value}, frames = "
          f"{[e.label for e in report.transcript]}")

    server_line = json.loads((workdir / "server.jsonl").read_text().splitlines()[-1])
    client_line = json.loads((workdir / "client.jsonl").read_text().splitlines()[-1])
    same = ([e["frame"] for e in server_line["transcript"]]
            == [e["frame"] for e in client_line["transcript"]])
    print(f"server log and client log agree on the wire bytes: {same}\n")

    # wrong password, three strikes, then the throttle
    wrong = Credentials(id_a=TOY_CREDS.id_a, id_b=TOY_CREDS.id_b, password=11)
    for attempt in range(1, 5):
        try:
            client_connect(service.address, wrong, TOY_PARAMS,
                           ClientOptions(hash_spec=spec, x=5))
        except RemoteError as exc:
            print(f"attempt {attempt}: error 0x{exc.code:02x} - {exc.detail}")

    # the honest client is locked out too until the window clears
    try:
        client_connect(service.address, TOY_CREDS, TOY_PARAMS,
                       ClientOptions(hash_spec=spec, x=3))
    except RemoteError as exc:
        print(f"honest retry while throttled: error 0x{exc.code:02x}")

"""Entry point: load the model pair in the background and serve.

Environment: MLORDER_MASKED_MODEL, MLORDER_CAUSAL_MODEL (required; the value
"stub" serves the deterministic test backends), MLORDER_PORT (default 8301),
MLORDER_DEVICE (default cpu).
"""
import os
import sys
import threading

import uvicorn

from .app import build_backends, create_app


def main():
    masked_id = os.environ.get("MLORDER_MASKED_MODEL")
    causal_id = os.environ.get("MLORDER_CAUSAL_MODEL")
    if not masked_id or not causal_id:
        print("set MLORDER_MASKED_MODEL and MLORDER_CAUSAL_MODEL", file=sys.stderr)
        sys.exit(2)
    port = int(os.environ.get("MLORDER_PORT", "8301"))
    device = os.environ.get("MLORDER_DEVICE", "cpu")

    app = create_app(masked_id=masked_id, causal_id=causal_id)
    state = app.state.models

    def load():
        try:
            masked, causal = build_backends(masked_id, causal_id, device=device)
        except Exception as exc:  # surfaced via /v1/health
            state.error = exc
            return
        state.masked = masked
        state.causal = causal

    threading.Thread(target=load, daemon=True).start()
    uvicorn.run(app, host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()

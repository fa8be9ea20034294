"""Start the HTTP service with the shipped datasets and replay fixtures.

    python demos/06_serve.py [port]

Then, for example:

    curl localhost:8000/datasets
    curl -X POST localhost:8000/jobs -H 'content-type: application/json' \
      -d '{"dataset_id": "ds-0004", "query_text": "tomatoes",
           "models": ["text-davinci-003"], "provider": "replay"}'

The frontend under frontend/ talks to these endpoints.
"""

import sys

import uvicorn

from text2chart.service import create_app

port = int(sys.argv[1]) if len(sys.argv) > 1 else 8000
uvicorn.run(create_app(), host="127.0.0.1", port=port)
